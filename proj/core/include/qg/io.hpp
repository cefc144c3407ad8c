#pragma once

#include "qg/functionals.hpp"
#include "qg/gauss_map.hpp"
#include "qg/loop_tools.hpp"
#include "qg/suites.hpp"
#include "qg/surface.hpp"

#include <string>
#include <vector>

// JSON documents. Arrays are row-major over nodes (index i * nv + j);
// complex numbers are [re, im] pairs; 6x6 matrices are 36 row-major entries.
// Readers throw Error(schema) on missing or mistyped fields.
namespace qg::io {

std::string surface_to_json(const SurfaceGrid& s);
SurfaceGrid surface_from_json(const std::string& text);

std::string legendre_to_json(const LegendreGrid& f);

std::string gauss_to_json(const GaussMapGrid& S);
GaussMapGrid gauss_from_json(const std::string& text);

std::string energy_to_json(const EnergyReport& e);
std::string tension_to_json(const TensionField& t, const GridChart& chart);
std::string flatness_to_json(const FlatnessReport& f, const GridChart& chart, cplx lambda);
std::string connection_to_json(const ConnectionGrid& a);
std::string frame_to_json(const FrameGrid& F);
std::string descent_to_json(const DescentResult& r);

std::string report_to_json(const SuiteReport& r);
SuiteReport report_from_json(const std::string& text);

// Pass/fail matrix over all reports plus convergence orders refitted from
// the pooled samples of same-named quantities of the same suite.
std::string merge_reports(const std::vector<std::string>& reports);

}  // namespace qg::io

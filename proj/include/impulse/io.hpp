#pragma once

#include "impulse/apseq.hpp"
#include "impulse/grid_solution.hpp"
#include "impulse/spectral.hpp"
#include "impulse/stepper.hpp"
#include "impulse/trig_series.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace impulse::io {

using nlohmann::json;

/// Shortest decimal that reads back to the same double.
std::string fmt(double x);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

json to_json(const TrigSeries& s);
TrigSeries trig_from_json(const json& j);

json to_json(const APSpec& spec);
APSpec apspec_from_json(const json& j);

json to_json(const SpectralVector& u);

/// index,time
std::string times_csv(const ImpulseTimes& times);
/// k,a_k
std::string spectral_csv(const SpectralVector& u);
/// j,t,k,a_k with both one-sided values at interior impulses.
std::string solution_csv(const GridSolution& sol);
/// Intervals with their node times and coefficient rows.
json solution_json(const GridSolution& sol);
/// t,k,a_k over all trajectory nodes.
std::string trajectory_csv(const Trajectory& tr);
/// j,t_cross,pre_norm,post_norm (norms in X^α).
std::string crossings_csv(const Trajectory& tr, double alpha);
/// j,t_cross,pre_norm,post_norm at the interior impulses of a grid solution.
std::string impulses_csv(const GridSolution& sol);
/// iter,sup_diff
std::string history_csv(const std::vector<double>& history);

}  // namespace impulse::io

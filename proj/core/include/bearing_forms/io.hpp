#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bearing_forms/sim.hpp"

namespace bearing_forms {

/// Fixed decimal formatting used by every emitted file, so reruns are
/// byte-identical.
std::string format_value(double value);

/// FNV-1a 64-bit hash of a byte string (scenario sources, trace files).
std::uint64_t fnv1a(std::string_view bytes);

/// Coordinate column suffix: x, y, z, w, then c5, c6, ...
std::string axis_suffix(int axis);

/// Closed-loop trace CSV. Columns: t, dn positions (+ dn velocities for
/// double-integrator traces), then err_p, err_delta, err_v, min_sep.
/// stride > 1 keeps every stride-th row (the grid stays uniform).
void write_trace_csv(std::ostream& out, const SimTrace& trace, int n, int d, int stride = 1);

/// Observer trace CSV: t, dn estimate columns, err_p (estimate error),
/// err_delta (centroid-removed error), err_v (centroid drift), min_sep.
void write_observer_csv(std::ostream& out, const ObserverTrace& trace, int n, int d,
                        int stride = 1);

/// Self-contained SVG polyline plot of labeled series against time.
/// Values are drawn on a log10 axis, clamped below at 1e-12.
std::string render_error_svg(const std::vector<double>& time,
                             const std::vector<std::pair<std::string, std::vector<double>>>& series,
                             const std::string& title);

/// Self-contained SVG of agent paths projected onto the first two axes, with
/// the formation edges drawn at the first and last snapshot (open and filled
/// markers respectively).
std::string render_trajectory_svg(const std::vector<Eigen::VectorXd>& positions, int n, int d,
                                  const std::vector<Edge>& edges, const std::string& title);

}  // namespace bearing_forms

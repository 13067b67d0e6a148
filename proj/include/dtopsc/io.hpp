#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtopsc/model.hpp"

namespace dtopsc {

/// Canonical instance document: `horizon`, `profit_scale`, `tasks[]`
/// (id, x, y, profit, duration, open, close, release), `workers[]`
/// (id, sx, sy, dx, dy, start, end) and an optional explicit `travel` matrix
/// in node order (tasks, origins, destinations).
Instance parse_instance(const std::string& text);
Instance load_instance(const std::filesystem::path& path);

/// `with_travel` forces the explicit matrix to be written.
std::string dump_instance(const Instance& instance, bool with_travel = false);
void save_instance(const Instance& instance, const std::filesystem::path& path, bool with_travel = false);

/// Plain text coordinates, one `x y` pair per line; blank lines and `#` comments skipped.
std::vector<Point> parse_coordinates(std::istream& in);
std::vector<Point> load_coordinates(const std::filesystem::path& path);

}  // namespace dtopsc

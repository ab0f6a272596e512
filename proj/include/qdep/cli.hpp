#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdep::cli {

// Runs one qdep command. Returns 0 on success, 1 on domain errors,
// 2 on usage errors. JSON results go to `out`, diagnostics to `err`;
// file-producing commands write where --out points.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qdep::cli

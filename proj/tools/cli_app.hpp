#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace luba::cli {

/// Entry point shared by the binary and the tests. args excludes argv[0].
/// Returns the process exit code: 0 success, 2 usage or domain error,
/// 3 I/O or schema error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace luba::cli

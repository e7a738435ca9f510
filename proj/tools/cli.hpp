#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optor::cli {

enum Exit : int { Ok = 0, Refuted = 1, InputError = 2, WindowInsufficient = 3 };

/// args excludes the program name. Output depends only on args and the files they name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optor::cli

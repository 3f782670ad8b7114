#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace infocouple::cli {

// Exit codes: 0 success, 1 validation or runtime error, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace infocouple::cli

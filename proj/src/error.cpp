#include "restarch/error.hpp"

namespace restarch {

namespace {

std::string describe_missing(const std::vector<std::string>& keys) {
    std::string msg = "missing template bindings:";
    for (const auto& k : keys) msg += " " + k;
    return msg;
}

}  // namespace

MissingBinding::MissingBinding(std::vector<std::string> keys)
    : Error(describe_missing(keys)), keys_(std::move(keys)) {}

}  // namespace restarch

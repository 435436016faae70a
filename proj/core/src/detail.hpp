#pragma once

#include "splitkit/engine.hpp"

#include <string>

namespace splitkit::detail {

double ip(const Vec& a, const Vec& b, const MetricKernel* U);
std::string num(double v);
[[noreturn]] void band_error(const std::string& who, const std::string& inequality, int n, const std::string& values);
CutReport direction_cut(const CutContext& c, const Vec& w, const MetricKernel* U);

}  // namespace splitkit::detail

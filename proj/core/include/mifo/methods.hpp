#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mifo/baselines.hpp"
#include "mifo/impute.hpp"

namespace mifo {

enum class Method { mifo, mean, knn, svd, svt, lls };

inline constexpr std::array<Method, 6> kAllMethods = {Method::mifo, Method::mean, Method::knn,
                                                      Method::svd,  Method::svt,  Method::lls};

std::string_view method_name(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct MethodParams {
  MifoParams mifo;
  BaselineParams baseline;
};

struct MethodOutcome {
  DataMatrix imputed;
  bool converged = true;
  std::size_t iterations = 0;
  std::vector<std::string> notes;
};

MethodOutcome run_method(Method method, const DataMatrix& m, const MethodParams& params);

}  // namespace mifo

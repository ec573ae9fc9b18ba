#include "mifo/methods.hpp"

namespace mifo {

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::mifo: return "mifo";
    case Method::mean: return "mean";
    case Method::knn: return "knn";
    case Method::svd: return "svd";
    case Method::svt: return "svt";
    case Method::lls: return "lls";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (auto m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

MethodOutcome run_method(Method method, const DataMatrix& m, const MethodParams& params) {
  auto from_baseline = [](BaselineResult r) {
    return MethodOutcome{std::move(r.imputed), r.converged, r.iterations, std::move(r.notes)};
  };
  switch (method) {
    case Method::mifo: {
      auto r = mifo_impute(m, params.mifo);
      return MethodOutcome{std::move(r.imputed), r.converged, r.iterations_run, {}};
    }
    case Method::mean: return MethodOutcome{mean_impute(m), true, 0, {}};
    case Method::knn: return from_baseline(knn_impute(m, params.baseline.knn_k));
    case Method::svd: return from_baseline(svd_impute(m, params.baseline));
    case Method::svt: return from_baseline(svt_impute(m, params.baseline));
    case Method::lls: return from_baseline(lls_impute(m, params.baseline));
  }
  return MethodOutcome{m, false, 0, {"unknown method"}};
}

}  // namespace mifo

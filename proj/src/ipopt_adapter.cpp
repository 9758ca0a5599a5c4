#include <dlfcn.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wdn/errors.hpp"
#include "wdn/solver.hpp"

namespace wdn {

// Subset of the Ipopt C interface (IpStdCInterface.h, 32-bit indices).
namespace ipopt_c {
using Index = int;
using Number = double;
using UserData = void*;
using Problem = void*;
using EvalF = bool (*)(Index, Number*, bool, Number*, UserData);
using EvalGradF = bool (*)(Index, Number*, bool, Number*, UserData);
using EvalG = bool (*)(Index, Number*, bool, Index, Number*, UserData);
using EvalJacG = bool (*)(Index, Number*, bool, Index, Index, Index*, Index*, Number*, UserData);
using EvalH = bool (*)(Index, Number*, bool, Number, Index, Number*, bool, Index, Index*, Index*,
                       Number*, UserData);
using Intermediate = bool (*)(Index, Index, Number, Number, Number, Number, Number, Number, Number,
                              Number, Index, UserData);

using Create = Problem (*)(Index, Number*, Number*, Index, Number*, Number*, Index, Index, Index,
                           EvalF, EvalG, EvalGradF, EvalJacG, EvalH);
using Free = void (*)(Problem);
using AddStr = bool (*)(Problem, char*, char*);
using AddNum = bool (*)(Problem, char*, Number);
using AddInt = bool (*)(Problem, char*, Index);
using SetIntermediate = bool (*)(Problem, Intermediate);
using Solve = int (*)(Problem, Number*, Number*, Number*, Number*, Number*, Number*, UserData);

// ApplicationReturnStatus values used below.
constexpr int kSolveSucceeded = 0;
constexpr int kSolvedToAcceptableLevel = 1;
constexpr int kInfeasibleProblemDetected = 2;
constexpr int kMaximumIterationsExceeded = -1;

constexpr Number kInfinity = 1e20;
}  // namespace ipopt_c

struct IpoptAdapter::Api {
  ipopt_c::Create create = nullptr;
  ipopt_c::Free free = nullptr;
  ipopt_c::AddStr add_str = nullptr;
  ipopt_c::AddNum add_num = nullptr;
  ipopt_c::AddInt add_int = nullptr;
  ipopt_c::SetIntermediate set_intermediate = nullptr;
  ipopt_c::Solve solve = nullptr;
};

namespace {

template <typename F>
F load_symbol(void* handle, const char* name) {
  void* sym = dlsym(handle, name);
  if (!sym) throw AdapterError(std::string("Ipopt library lacks symbol ") + name);
  return reinterpret_cast<F>(sym);
}

struct Callbacks {
  const NlpModel* model = nullptr;
  std::size_t iterations = 0;
};

using ipopt_c::Index;
using ipopt_c::Number;

bool eval_f(Index n, Number* x, bool, Number* value, ipopt_c::UserData data) {
  auto* cb = static_cast<Callbacks*>(data);
  *value = cb->model->objective_value({x, static_cast<std::size_t>(n)});
  return std::isfinite(*value);
}

bool eval_grad_f(Index n, Number*, bool, Number* grad, ipopt_c::UserData data) {
  auto* cb = static_cast<Callbacks*>(data);
  std::copy_n(cb->model->objective().begin(), n, grad);
  return true;
}

bool eval_g(Index n, Number* x, bool, Index m, Number* g, ipopt_c::UserData data) {
  auto* cb = static_cast<Callbacks*>(data);
  cb->model->residuals({x, static_cast<std::size_t>(n)}, {g, static_cast<std::size_t>(m)});
  return std::all_of(g, g + m, [](double v) { return std::isfinite(v); });
}

bool eval_jac_g(Index n, Number* x, bool, Index, Index nnz, Index* rows, Index* cols,
                Number* values, ipopt_c::UserData data) {
  auto* cb = static_cast<Callbacks*>(data);
  if (!values) {
    const auto& s = cb->model->jacobian_structure();
    for (Index k = 0; k < nnz; ++k) {
      rows[k] = static_cast<Index>(s[static_cast<std::size_t>(k)].first);
      cols[k] = static_cast<Index>(s[static_cast<std::size_t>(k)].second);
    }
    return true;
  }
  cb->model->jacobian({x, static_cast<std::size_t>(n)}, {values, static_cast<std::size_t>(nnz)});
  return true;
}

bool eval_h(Index n, Number* x, bool, Number, Index m, Number* lambda, bool, Index nnz,
            Index* rows, Index* cols, Number* values, ipopt_c::UserData data) {
  auto* cb = static_cast<Callbacks*>(data);
  if (!values) {
    const auto& s = cb->model->hessian_structure();
    for (Index k = 0; k < nnz; ++k) {
      rows[k] = static_cast<Index>(s[static_cast<std::size_t>(k)].first);
      cols[k] = static_cast<Index>(s[static_cast<std::size_t>(k)].second);
    }
    return true;
  }
  // The objective is linear: only constraint curvature contributes.
  cb->model->hessian({x, static_cast<std::size_t>(n)}, {lambda, static_cast<std::size_t>(m)},
                     {values, static_cast<std::size_t>(nnz)});
  return true;
}

bool intermediate(Index, Index iter, Number, Number, Number, Number, Number, Number, Number, Number,
                  Index, ipopt_c::UserData data) {
  static_cast<Callbacks*>(data)->iterations = static_cast<std::size_t>(iter);
  return true;
}

Number finite(double v) {
  return std::clamp(v, -ipopt_c::kInfinity, ipopt_c::kInfinity);
}

}  // namespace

IpoptAdapter::IpoptAdapter(const std::string& library_path) : api_(std::make_unique<Api>()) {
  handle_ = dlopen(library_path.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (!handle_) {
    const char* err = dlerror();
    throw AdapterError("cannot load Ipopt from '" + library_path + "': " + (err ? err : "unknown"));
  }
  try {
    api_->create = load_symbol<ipopt_c::Create>(handle_, "CreateIpoptProblem");
    api_->free = load_symbol<ipopt_c::Free>(handle_, "FreeIpoptProblem");
    api_->add_str = load_symbol<ipopt_c::AddStr>(handle_, "AddIpoptStrOption");
    api_->add_num = load_symbol<ipopt_c::AddNum>(handle_, "AddIpoptNumOption");
    api_->add_int = load_symbol<ipopt_c::AddInt>(handle_, "AddIpoptIntOption");
    api_->set_intermediate = load_symbol<ipopt_c::SetIntermediate>(handle_, "SetIntermediateCallback");
    api_->solve = load_symbol<ipopt_c::Solve>(handle_, "IpoptSolve");
  } catch (...) {
    dlclose(handle_);
    throw;
  }
}

IpoptAdapter::~IpoptAdapter() {
  if (handle_) dlclose(handle_);
}

AdapterResult IpoptAdapter::solve(const NlpModel& model, std::span<const double> start,
                                  const SolverOptions& options) const {
  const auto n = static_cast<Index>(model.variable_count());
  const auto m = static_cast<Index>(model.constraint_count());
  std::vector<Number> x_lower(model.variable_count()), x_upper(model.variable_count());
  for (std::size_t j = 0; j < model.variable_count(); ++j) {
    x_lower[j] = finite(model.variables()[j].lower);
    x_upper[j] = finite(model.variables()[j].upper);
  }
  std::vector<Number> g_lower(model.constraint_count()), g_upper(model.constraint_count());
  for (std::size_t i = 0; i < model.constraint_count(); ++i) {
    g_lower[i] = finite(model.constraint(i).lower);
    g_upper[i] = finite(model.constraint(i).upper);
  }

  std::lock_guard lock(mutex_);
  ipopt_c::Problem problem = api_->create(
      n, x_lower.data(), x_upper.data(), m, g_lower.data(), g_upper.data(),
      static_cast<Index>(model.jacobian_structure().size()),
      static_cast<Index>(model.hessian_structure().size()), 0, eval_f, eval_g, eval_grad_f,
      eval_jac_g, eval_h);
  if (!problem) throw AdapterError("Ipopt rejected the problem");

  auto str = [&](const char* key, const char* value) {
    api_->add_str(problem, const_cast<char*>(key), const_cast<char*>(value));
  };
  auto num = [&](const char* key, double value) {
    api_->add_num(problem, const_cast<char*>(key), value);
  };
  auto integer = [&](const char* key, int value) {
    api_->add_int(problem, const_cast<char*>(key), value);
  };
  integer("print_level", 0);
  str("sb", "yes");
  integer("max_iter", static_cast<int>(options.max_iterations));
  num("tol", 1e-8);
  num("constr_viol_tol", 1e-2 * options.feasibility_tolerance);
  num("dual_inf_tol", options.optimality_tolerance);
  num("bound_relax_factor", 0.0);
  str("mu_strategy", "adaptive");

  Callbacks callbacks{&model, 0};
  api_->set_intermediate(problem, intermediate);

  AdapterResult result;
  result.x.assign(start.begin(), start.end());
  std::vector<Number> g(model.constraint_count());
  Number objective = 0.0;
  int status = api_->solve(problem, result.x.data(), g.data(), &objective, nullptr, nullptr, nullptr,
                           &callbacks);
  api_->free(problem);

  result.iterations = callbacks.iterations;
  result.message = "ipopt status " + std::to_string(status);
  switch (status) {
    case ipopt_c::kSolveSucceeded:
    case ipopt_c::kSolvedToAcceptableLevel:
      result.status = SolveStatus::kLocalOptimum;
      break;
    case ipopt_c::kInfeasibleProblemDetected:
      result.status = SolveStatus::kInfeasible;
      break;
    case ipopt_c::kMaximumIterationsExceeded:
      result.status = SolveStatus::kIterationLimit;
      break;
    default:
      result.status = SolveStatus::kNumericalFailure;
  }
  return result;
}

}  // namespace wdn

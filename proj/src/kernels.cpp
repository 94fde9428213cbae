#include "plap/kernels.hpp"

#include <stdexcept>
#include <string>

namespace plap::kernels {
namespace {

const Ops* table_for(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return &detail::avx2_ops;
#endif
  return &detail::scalar_ops;
}

Backend best_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (detail::cpu_has_avx2()) return Backend::avx2;
#endif
  return Backend::scalar;
}

struct State {
  Backend backend;
  const Ops* table;
  State() : backend(best_backend()), table(table_for(backend)) {}
};

State& state() {
  static State s;
  return s;
}

}  // namespace

const Ops& ops() { return *state().table; }

Backend active() { return state().backend; }

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return detail::cpu_has_avx2();
#else
      return false;
#endif
  }
  return false;
}

std::string_view name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void force(Backend b) {
  if (!supported(b))
    throw std::runtime_error("kernel backend '" + std::string(name(b)) +
                             "' is not supported on this CPU");
  State& s = state();
  s.backend = b;
  s.table = table_for(b);
}

void use_best() { force(best_backend()); }

#if defined(__x86_64__) || defined(_M_X64)
namespace detail {
bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
}  // namespace detail
#endif

}  // namespace plap::kernels

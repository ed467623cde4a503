#include "andor/report.hpp"

#include <stdexcept>

#include "andor/util.hpp"

namespace andor {

ContextCodec::ContextCodec(const Model& m, const std::vector<VarId>& ctx_vars)
    : vars_(ctx_vars) {
  sizes_.reserve(vars_.size());
  for (VarId v : vars_) {
    sizes_.push_back(m.domain_size(v));
    space_ *= m.domain_size(v);
  }
}

long long ContextCodec::code_of(const Assignment& a) const {
  long long code = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!a.assigned(vars_[i]))
      throw std::invalid_argument("context variable unassigned");
    code = code * sizes_[i] + a.value(vars_[i]);
  }
  return code;
}

std::vector<int> ContextCodec::values_of(long long code) const {
  std::vector<int> vals(vars_.size());
  for (int i = int(vars_.size()) - 1; i >= 0; --i) {
    vals[std::size_t(i)] = int(code % sizes_[std::size_t(i)]);
    code /= sizes_[std::size_t(i)];
  }
  return vals;
}

std::uint64_t run_fingerprint(const Model& m, const PseudoTree& t) {
  std::uint64_t h = fnv1a64(render_model(m));
  for (VarId p : t.parent) h = fnv1a64(&p, sizeof(p), h);
  h = fnv1a64(&t.root, sizeof(t.root), h);
  return h;
}

}  // namespace andor

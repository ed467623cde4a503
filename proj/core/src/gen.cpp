#include "andor/gen.hpp"

#include <sstream>
#include <stdexcept>

#include "andor/util.hpp"

namespace andor {

namespace {

void emit_header(std::ostringstream& out, const std::string& name, int n,
                 const std::vector<int>& sizes,
                 const std::vector<VarId>& ordering) {
  out << "model " << name << "\n";
  out << "# recommended ordering:";
  for (std::size_t i = 0; i < ordering.size(); ++i)
    out << (i ? "," : " ") << ordering[i];
  out << "\n";
  out << "vars " << n << "\n";
  for (int v = 0; v < n; ++v) out << "dom " << v << " " << sizes[std::size_t(v)] << "\n";
}

void emit_factor(std::ostringstream& out, const std::vector<VarId>& scope,
                 const std::vector<double>& table) {
  out << "factor " << scope.size();
  for (VarId v : scope) out << " " << v;
  out << "\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    out << (i ? " " : "") << format_double(table[i]);
  out << "\n";
}

// conditional table over (parents..., child) normalized over the child
std::vector<double> cpt(int rows, int child_size, bool uniform, Lcg& rng) {
  std::vector<double> t(static_cast<std::size_t>(rows * child_size));
  for (int r = 0; r < rows; ++r) {
    if (uniform) {
      for (int c = 0; c < child_size; ++c)
        t[std::size_t(r * child_size + c)] = 1.0 / child_size;
    } else {
      double sum = 0.0;
      for (int c = 0; c < child_size; ++c) {
        double u = rng.unit_open();
        t[std::size_t(r * child_size + c)] = u;
        sum += u;
      }
      for (int c = 0; c < child_size; ++c) t[std::size_t(r * child_size + c)] /= sum;
    }
  }
  return t;
}

// belief network over A,B,C,D,E with CPT scopes {A},{A,B},{A,C},{B,C,D},{A,B,E}
std::string gen_fig(const GenSpec& spec) {
  Lcg rng(spec.seed);
  std::ostringstream out;
  std::vector<int> sizes(5, 2);
  emit_header(out, spec.name, 5, sizes, gen_recommended_ordering(spec.name, 5));
  emit_factor(out, {0}, cpt(1, 2, spec.uniform, rng));           // P(A)
  emit_factor(out, {0, 1}, cpt(2, 2, spec.uniform, rng));        // P(B|A)
  emit_factor(out, {0, 2}, cpt(2, 2, spec.uniform, rng));        // P(C|A)
  emit_factor(out, {1, 2, 3}, cpt(4, 2, spec.uniform, rng));     // P(D|B,C)
  emit_factor(out, {0, 1, 4}, cpt(4, 2, spec.uniform, rng));     // P(E|A,B)
  out << "end\n";
  return out.str();
}

// two cliques over A+B and A+C (thirds of the variables), strictly positive
// seeded pair functions
std::string gen_ex33(const GenSpec& spec) {
  if (spec.n < 3 || spec.n % 3 != 0)
    throw std::invalid_argument("ex33 requires n divisible by 3");
  int n = spec.n;
  int third = n / 3;
  Lcg rng(spec.seed);
  std::ostringstream out;
  std::vector<int> sizes(static_cast<std::size_t>(n), 2);
  emit_header(out, "ex33", n, sizes, gen_recommended_ordering("ex33", n));

  auto pair_table = [&] {
    std::vector<double> t(4);
    for (double& x : t) x = spec.uniform ? 1.0 : rng.unit_open();
    return t;
  };

  // clique on A u B
  for (int i = 0; i < 2 * third; ++i)
    for (int j = i + 1; j < 2 * third; ++j)
      emit_factor(out, {i, j}, pair_table());
  // clique on A u C; the A-internal pairs are already present
  for (int i = 0; i < n; ++i) {
    if (i >= third && i < 2 * third) continue;
    for (int j = i + 1; j < n; ++j) {
      if (j >= third && j < 2 * third) continue;
      if (i < third && j < third) continue;
      emit_factor(out, {i, j}, pair_table());
    }
  }
  out << "end\n";
  return out.str();
}

// chain of < constraints over {1..4}
std::string gen_ex34(const GenSpec&) {
  std::ostringstream out;
  std::vector<int> sizes(4, 4);
  emit_header(out, "ex34", 4, sizes, gen_recommended_ordering("ex34", 4));
  for (int v = 0; v < 3; ++v) {
    std::vector<double> t(16);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) t[std::size_t(a * 4 + b)] = a < b ? 1.0 : 0.0;
    emit_factor(out, {v, v + 1}, t);
  }
  out << "end\n";
  return out.str();
}

// n-1 variables over {1..n-2,*} pairwise all-different on the integers and
// equal on the stars; a joint constraint ties the single-valued last
// variable to the star of every other one, kept n-ary so that forward
// checking cannot consult it before the search reaches the bottom
std::string gen_ex43(const GenSpec& spec) {
  if (spec.n < 3) throw std::invalid_argument("ex43 requires n >= 3");
  int n = spec.n;
  int k = n - 1;     // n-2 integers plus the star
  int star = k - 1;  // star is the last value index
  std::ostringstream out;
  std::vector<int> sizes(static_cast<std::size_t>(n), k);
  sizes[std::size_t(n - 1)] = 1;
  emit_header(out, "ex43", n, sizes, gen_recommended_ordering("ex43", n));

  for (int i = 0; i < n - 1; ++i)
    for (int j = i + 1; j < n - 1; ++j) {
      std::vector<double> t(static_cast<std::size_t>(k * k), 0.0);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          bool ok = (a == star && b == star) || (a != star && b != star && a != b);
          t[std::size_t(a * k + b)] = ok ? 1.0 : 0.0;
        }
      emit_factor(out, {i, j}, t);
    }
  long long rows = 1;
  for (int i = 0; i < n - 1; ++i) rows *= k;
  std::vector<double> joint(static_cast<std::size_t>(rows), 0.0);
  long long all_star = 0;
  for (int i = 0; i < n - 1; ++i) all_star = all_star * k + star;
  joint[std::size_t(all_star)] = 1.0;
  std::vector<VarId> scope(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) scope[std::size_t(i)] = i;
  emit_factor(out, scope, joint);
  out << "end\n";
  return out.str();
}

std::string gen_random(const GenSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("random requires n >= 1");
  if (spec.k < 1) throw std::invalid_argument("random requires k >= 1");
  int n = spec.n;
  Lcg rng(spec.seed);
  std::ostringstream out;
  std::vector<int> sizes(static_cast<std::size_t>(n), spec.k);
  emit_header(out, "random", n, sizes, gen_recommended_ordering("random", n));

  auto table = [&](long long cells) {
    std::vector<double> t(static_cast<std::size_t>(cells));
    for (double& x : t) {
      double gate = rng.unit_open();
      double val = rng.unit_open();
      x = (spec.zero_frac > 0.0 && gate <= spec.zero_frac) ? 0.0
          : (spec.uniform ? 1.0 : val);
    }
    return t;
  };

  emit_factor(out, {0}, table(spec.k));
  for (int i = 1; i < n; ++i) {
    int j = rng.below(i);
    emit_factor(out, {j, i}, table((long long)spec.k * spec.k));
  }
  int extras = n / 2;
  for (int e = 0; e < extras && n >= 3; ++e) {
    int arity = 2 + rng.below(2);
    std::set<int> scope;
    while (int(scope.size()) < arity) scope.insert(rng.below(n));
    std::vector<VarId> vars(scope.begin(), scope.end());
    long long cells = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) cells *= spec.k;
    emit_factor(out, vars, table(cells));
  }
  out << "end\n";
  return out.str();
}

}  // namespace

std::vector<VarId> gen_recommended_ordering(const std::string& name, int n) {
  if (name == "fig1") return {0, 1, 4, 2, 3};  // (A,B,E,C,D)
  if (name == "fig4") return {3, 2, 1, 0, 4};  // (D,C,B,A,E)
  if (name == "ex34") return {0, 1, 2, 3};
  std::vector<VarId> id(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) id[std::size_t(i)] = i;
  return id;
}

std::string gen_model_text(const GenSpec& spec) {
  if (spec.name == "fig1" || spec.name == "fig4") return gen_fig(spec);
  if (spec.name == "ex33") return gen_ex33(spec);
  if (spec.name == "ex34") return gen_ex34(spec);
  if (spec.name == "ex43") return gen_ex43(spec);
  if (spec.name == "random") return gen_random(spec);
  throw std::invalid_argument("unknown generator '" + spec.name + "'");
}

}  // namespace andor

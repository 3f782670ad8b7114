#include "infocouple/mec.hpp"

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "infocouple/errors.hpp"

namespace infocouple::mec {

namespace {

// Residuals below this are treated as exhausted so the loops terminate.
constexpr double kResidualFloor = 1e-12;

struct Residual {
  double mass;
  std::size_t index;
};

// Largest mass first, then lowest index.
struct ByMass {
  bool operator()(const Residual& a, const Residual& b) const {
    if (a.mass != b.mass) return a.mass < b.mass;
    return a.index > b.index;
  }
};

using MaxHeap = std::priority_queue<Residual, std::vector<Residual>, ByMass>;

MaxHeap heap_of(const Distribution& d) {
  MaxHeap heap;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > kResidualFloor) heap.push(Residual{d[i], i});
  return heap;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "max" || name == "max-seeking") return Method::max_seeking;
  if (name == "zero" || name == "zero-seeking") return Method::zero_seeking;
  throw DomainError("unknown coupling method '" + std::string(name) + "' (expected max|zero)");
}

std::string_view to_string(Method method) { return method == Method::max_seeking ? "max" : "zero"; }

Coupling max_seeking(const Distribution& p, const Distribution& q) {
  const std::size_t cols = q.size();
  std::vector<double> table(p.size() * cols, 0.0);
  MaxHeap rows = heap_of(p);
  MaxHeap columns = heap_of(q);
  while (!rows.empty() && !columns.empty()) {
    Residual x = rows.top();
    Residual y = columns.top();
    rows.pop();
    columns.pop();
    const double m = std::min(x.mass, y.mass);
    table[x.index * cols + y.index] += m;
    x.mass -= m;
    y.mass -= m;
    if (x.mass > kResidualFloor) rows.push(x);
    if (y.mass > kResidualFloor) columns.push(y);
  }
  return Coupling(p.size(), cols, std::move(table));
}

Coupling zero_seeking(const Distribution& p, const Distribution& q) {
  const std::size_t cols = q.size();
  std::vector<double> table(p.size() * cols, 0.0);
  std::vector<double> rp(p.vector());
  std::vector<double> rq(q.vector());
  for (double& v : rp)
    if (v <= kResidualFloor) v = 0.0;
  for (double& v : rq)
    if (v <= kResidualFloor) v = 0.0;
  while (true) {
    bool found = false;
    double best = 0.0;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < rp.size(); ++i) {
      if (rp[i] == 0.0) continue;
      for (std::size_t j = 0; j < rq.size(); ++j) {
        if (rq[j] == 0.0) continue;
        const double d = std::abs(rp[i] - rq[j]);
        if (!found || d < best) {
          found = true;
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (!found) break;
    const double m = std::min(rp[bi], rq[bj]);
    table[bi * cols + bj] += m;
    rp[bi] -= m;
    rq[bj] -= m;
    if (rp[bi] <= kResidualFloor) rp[bi] = 0.0;
    if (rq[bj] <= kResidualFloor) rq[bj] = 0.0;
  }
  return Coupling(p.size(), cols, std::move(table));
}

Coupling couple(const Distribution& p, const Distribution& q, Method method) {
  return method == Method::max_seeking ? max_seeking(p, q) : zero_seeking(p, q);
}

Bits joint_entropy(const Coupling& c) noexcept { return entropy_bits(c.cells()); }

}  // namespace infocouple::mec

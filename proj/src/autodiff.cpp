#include "paycheck/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "paycheck/kernels.hpp"

namespace paycheck::ad {

int Var::size() const { return tape_->size(*this); }

double Var::value() const {
  auto v = tape_->value(*this);
  if (v.size() != 1) throw std::logic_error("Var::value on non-scalar node");
  return v[0];
}

std::span<const double> Var::values() const { return tape_->value(*this); }

void Tape::check(Var v) const {
  if (v.tape() != this || v.id() < 0 || v.id() >= static_cast<int>(nodes_.size()))
    throw std::logic_error("variable is not recorded on this tape");
}

Var Tape::push(Node node) {
  node.offset = static_cast<int>(values_.size());
  values_.resize(values_.size() + node.size);
  nodes_.push_back(node);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::note_kink(double distance) {
  if (distance != 0.0 && distance < min_kink_distance_) min_kink_distance_ = distance;
}

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  adjoints_.clear();
  stack_inputs_.clear();
  min_kink_distance_ = std::numeric_limits<double>::infinity();
}

int Tape::size(Var v) const {
  check(v);
  return nodes_[v.id()].size;
}

std::span<const double> Tape::value(Var v) const {
  check(v);
  const Node& n = nodes_[v.id()];
  return {values_.data() + n.offset, static_cast<std::size_t>(n.size)};
}

std::span<const double> Tape::adjoint(Var v) const {
  check(v);
  if (adjoints_.size() != values_.size())
    throw std::logic_error("adjoint requested before backward()");
  const Node& n = nodes_[v.id()];
  return {adjoints_.data() + n.offset, static_cast<std::size_t>(n.size)};
}

Var Tape::leaf(std::span<const double> values) {
  Node n{Op::kLeaf};
  n.size = static_cast<int>(values.size());
  Var v = push(n);
  std::copy(values.begin(), values.end(), values_.begin() + nodes_.back().offset);
  return v;
}

Var Tape::leaf(double value) { return leaf(std::span<const double>(&value, 1)); }

Var Tape::constant(std::span<const double> values) {
  Node n{Op::kConstant};
  n.size = static_cast<int>(values.size());
  Var v = push(n);
  std::copy(values.begin(), values.end(), values_.begin() + nodes_.back().offset);
  return v;
}

Var Tape::constant(double value) { return constant(std::span<const double>(&value, 1)); }

namespace {

void require_same_size(int a, int b, const char* op) {
  if (a != b) throw std::invalid_argument(std::string(op) + ": operand sizes differ");
}

}  // namespace

#define PAYCHECK_BINARY(name, opcode, expr)                                \
  Var Tape::name(Var a, Var b) {                                           \
    check(a);                                                              \
    check(b);                                                              \
    require_same_size(nodes_[a.id()].size, nodes_[b.id()].size, #name);    \
    Node n{opcode};                                                        \
    n.a = a.id();                                                          \
    n.b = b.id();                                                          \
    n.size = nodes_[a.id()].size;                                          \
    Var out = push(n);                                                     \
    const double* x = values_.data() + nodes_[a.id()].offset;              \
    const double* y = values_.data() + nodes_[b.id()].offset;              \
    double* z = values_.data() + nodes_.back().offset;                     \
    for (int i = 0; i < n.size; ++i) z[i] = (expr);                        \
    return out;                                                            \
  }

PAYCHECK_BINARY(add, Op::kAdd, x[i] + y[i])
PAYCHECK_BINARY(sub, Op::kSub, x[i] - y[i])
PAYCHECK_BINARY(mul, Op::kMul, x[i] * y[i])

#undef PAYCHECK_BINARY

#define PAYCHECK_UNARY_CONST(name, opcode, expr)              \
  Var Tape::name(Var a, double c) {                           \
    check(a);                                                 \
    Node n{opcode};                                           \
    n.a = a.id();                                             \
    n.size = nodes_[a.id()].size;                             \
    n.c0 = c;                                                 \
    Var out = push(n);                                        \
    const double* x = values_.data() + nodes_[a.id()].offset; \
    double* z = values_.data() + nodes_.back().offset;        \
    for (int i = 0; i < n.size; ++i) z[i] = (expr);           \
    return out;                                               \
  }

PAYCHECK_UNARY_CONST(scale, Op::kScale, x[i] * c)
PAYCHECK_UNARY_CONST(div, Op::kDivConst, x[i] / c)
PAYCHECK_UNARY_CONST(shift, Op::kShift, x[i] + c)

#undef PAYCHECK_UNARY_CONST

Var Tape::rsub(double c, Var a) {
  check(a);
  Node n{Op::kRSubConst};
  n.a = a.id();
  n.size = nodes_[a.id()].size;
  n.c0 = c;
  Var out = push(n);
  const double* x = values_.data() + nodes_[a.id()].offset;
  double* z = values_.data() + nodes_.back().offset;
  for (int i = 0; i < n.size; ++i) z[i] = c - x[i];
  return out;
}

Var Tape::affine(Var params, int weight_offset, int bias_offset, int rows, int cols, Var x) {
  check(params);
  check(x);
  const Node& p = nodes_[params.id()];
  if (nodes_[x.id()].size != cols) throw std::invalid_argument("affine: input size mismatch");
  if (weight_offset < 0 || weight_offset + rows * cols > p.size || bias_offset < 0 ||
      bias_offset + rows > p.size)
    throw std::invalid_argument("affine: parameter slice out of range");
  Node n{Op::kAffine};
  n.a = params.id();
  n.b = x.id();
  n.rows = rows;
  n.cols = cols;
  n.aux0 = weight_offset;
  n.aux1 = bias_offset;
  n.size = rows;
  Var out = push(n);
  const Node& pa = nodes_[params.id()];
  const double* base = values_.data() + pa.offset;
  kernels::affine(base + weight_offset, base + bias_offset, values_.data() + nodes_[x.id()].offset,
                  rows, cols, values_.data() + nodes_.back().offset);
  return out;
}

Var Tape::tanh(Var a) {
  check(a);
  Node n{Op::kTanh};
  n.a = a.id();
  n.size = nodes_[a.id()].size;
  Var out = push(n);
  const double* x = values_.data() + nodes_[a.id()].offset;
  double* z = values_.data() + nodes_.back().offset;
  for (int i = 0; i < n.size; ++i) z[i] = std::tanh(x[i]);
  return out;
}

Var Tape::relu(Var a) {
  check(a);
  Node n{Op::kRelu};
  n.a = a.id();
  n.size = nodes_[a.id()].size;
  Var out = push(n);
  const double* x = values_.data() + nodes_[a.id()].offset;
  double* z = values_.data() + nodes_.back().offset;
  for (int i = 0; i < n.size; ++i) {
    z[i] = x[i] > 0.0 ? x[i] : 0.0;
    note_kink(std::abs(x[i]));
  }
  return out;
}

Var Tape::clamp(Var a, double lo, double hi) {
  check(a);
  Node n{Op::kClamp};
  n.a = a.id();
  n.size = nodes_[a.id()].size;
  n.c0 = lo;
  n.c1 = hi;
  Var out = push(n);
  const double* x = values_.data() + nodes_[a.id()].offset;
  double* z = values_.data() + nodes_.back().offset;
  for (int i = 0; i < n.size; ++i) {
    z[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
    note_kink(std::abs(x[i] - lo));
    if (std::isfinite(hi)) note_kink(std::abs(x[i] - hi));
  }
  return out;
}

Var Tape::softmax(Var a) {
  check(a);
  Node n{Op::kSoftmax};
  n.a = a.id();
  n.size = nodes_[a.id()].size;
  Var out = push(n);
  kernels::softmax(values_.data() + nodes_[a.id()].offset, n.size,
                   values_.data() + nodes_.back().offset);
  return out;
}

Var Tape::sum(Var a) {
  check(a);
  Node n{Op::kSum};
  n.a = a.id();
  n.size = 1;
  Var out = push(n);
  const Node& src = nodes_[a.id()];
  double total = 0.0;
  for (int i = 0; i < src.size; ++i) total += values_[src.offset + i];
  values_[nodes_.back().offset] = total;
  return out;
}

Var Tape::index(Var a, int i) {
  check(a);
  if (i < 0 || i >= nodes_[a.id()].size) throw std::out_of_range("index: out of range");
  Node n{Op::kIndex};
  n.a = a.id();
  n.aux0 = i;
  n.size = 1;
  Var out = push(n);
  values_[nodes_.back().offset] = values_[nodes_[a.id()].offset + i];
  return out;
}

Var Tape::stack(std::span<const Var> scalars) {
  Node n{Op::kStack};
  n.aux0 = static_cast<int>(stack_inputs_.size());
  n.size = static_cast<int>(scalars.size());
  for (Var s : scalars) {
    check(s);
    if (nodes_[s.id()].size != 1) throw std::invalid_argument("stack: inputs must be scalars");
    stack_inputs_.push_back(s.id());
  }
  Var out = push(n);
  double* z = values_.data() + nodes_.back().offset;
  for (int i = 0; i < n.size; ++i) z[i] = values_[nodes_[stack_inputs_[n.aux0 + i]].offset];
  return out;
}

void Tape::accumulate(const Node& n) {
  const double* g = adjoints_.data() + n.offset;
  const double* y = values_.data() + n.offset;
  switch (n.op) {
    case Op::kLeaf:
    case Op::kConstant:
      return;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul: {
      const Node& a = nodes_[n.a];
      const Node& b = nodes_[n.b];
      double* ga = adjoints_.data() + a.offset;
      double* gb = adjoints_.data() + b.offset;
      const double* xa = values_.data() + a.offset;
      const double* xb = values_.data() + b.offset;
      for (int i = 0; i < n.size; ++i) {
        if (n.op == Op::kAdd) {
          ga[i] += g[i];
          gb[i] += g[i];
        } else if (n.op == Op::kSub) {
          ga[i] += g[i];
          gb[i] -= g[i];
        } else {
          ga[i] += g[i] * xb[i];
          gb[i] += g[i] * xa[i];
        }
      }
      return;
    }
    case Op::kScale:
    case Op::kDivConst:
    case Op::kShift:
    case Op::kRSubConst: {
      double* ga = adjoints_.data() + nodes_[n.a].offset;
      for (int i = 0; i < n.size; ++i) {
        switch (n.op) {
          case Op::kScale: ga[i] += g[i] * n.c0; break;
          case Op::kDivConst: ga[i] += g[i] / n.c0; break;
          case Op::kShift: ga[i] += g[i]; break;
          default: ga[i] -= g[i]; break;
        }
      }
      return;
    }
    case Op::kAffine: {
      const Node& p = nodes_[n.a];
      const Node& x = nodes_[n.b];
      const double* w = values_.data() + p.offset + n.aux0;
      double* gw = adjoints_.data() + p.offset + n.aux0;
      double* gbias = adjoints_.data() + p.offset + n.aux1;
      const double* xv = values_.data() + x.offset;
      double* gx = adjoints_.data() + x.offset;
      for (int i = 0; i < n.rows; ++i) {
        const double gi = g[i];
        gbias[i] += gi;
        if (gi == 0.0) continue;
        double* gw_row = gw + static_cast<long>(i) * n.cols;
        const double* w_row = w + static_cast<long>(i) * n.cols;
        for (int j = 0; j < n.cols; ++j) {
          gw_row[j] += gi * xv[j];
          gx[j] += gi * w_row[j];
        }
      }
      return;
    }
    case Op::kTanh: {
      double* ga = adjoints_.data() + nodes_[n.a].offset;
      for (int i = 0; i < n.size; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case Op::kRelu: {
      const Node& a = nodes_[n.a];
      double* ga = adjoints_.data() + a.offset;
      const double* x = values_.data() + a.offset;
      for (int i = 0; i < n.size; ++i)
        if (x[i] > 0.0) ga[i] += g[i];
      return;
    }
    case Op::kClamp: {
      const Node& a = nodes_[n.a];
      double* ga = adjoints_.data() + a.offset;
      const double* x = values_.data() + a.offset;
      for (int i = 0; i < n.size; ++i)
        if (x[i] > n.c0 && x[i] < n.c1) ga[i] += g[i];
      return;
    }
    case Op::kSoftmax: {
      double* ga = adjoints_.data() + nodes_[n.a].offset;
      double dot = 0.0;
      for (int i = 0; i < n.size; ++i) dot += g[i] * y[i];
      for (int i = 0; i < n.size; ++i) ga[i] += y[i] * (g[i] - dot);
      return;
    }
    case Op::kSum: {
      const Node& a = nodes_[n.a];
      double* ga = adjoints_.data() + a.offset;
      for (int i = 0; i < a.size; ++i) ga[i] += g[0];
      return;
    }
    case Op::kIndex:
      adjoints_[nodes_[n.a].offset + n.aux0] += g[0];
      return;
    case Op::kStack:
      for (int i = 0; i < n.size; ++i) adjoints_[nodes_[stack_inputs_[n.aux0 + i]].offset] += g[i];
      return;
  }
}

void Tape::backward(Var output) {
  check(output);
  if (nodes_[output.id()].size != 1) throw std::invalid_argument("backward: output must be scalar");
  adjoints_.assign(values_.size(), 0.0);
  adjoints_[nodes_[output.id()].offset] = 1.0;
  for (int id = output.id(); id >= 0; --id) accumulate(nodes_[id]);
}

}  // namespace paycheck::ad

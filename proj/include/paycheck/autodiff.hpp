#pragma once

// Reverse-mode automatic differentiation over a flat tape.
//
// Nodes hold small dense vectors (scalars are vectors of length one), so a
// whole dense layer is a single Affine node and the per-goal dynamics are
// scalar nodes. Values and adjoints live in two contiguous arenas that are
// reused across clear() calls; recording a 120-month rollout allocates nothing
// once the tape has warmed up.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace paycheck::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until the tape is cleared.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  int size() const;

  // Scalar value; the node must have length one.
  double value() const;
  std::span<const double> values() const;

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

enum class Op : std::uint8_t {
  kLeaf,
  kConstant,
  kAdd,
  kSub,
  kMul,
  kScale,      // a * c
  kDivConst,   // a / c
  kShift,      // a + c
  kRSubConst,  // c - a
  kAffine,     // W x + b, W and b are slices of node a
  kTanh,
  kRelu,
  kClamp,
  kSoftmax,
  kSum,
  kIndex,
  kStack,
};

class Tape {
 public:
  // Differentiable input. Gradients accumulate into its adjoint.
  Var leaf(std::span<const double> values);
  Var leaf(double value);
  // Non-differentiable input.
  Var constant(std::span<const double> values);
  Var constant(double value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var div(Var a, double c);
  Var shift(Var a, double c);
  Var rsub(double c, Var a);

  // y = W x + b where W (rows x cols, row-major) starts at `weight_offset`
  // inside `params` and b (rows) starts at `bias_offset`.
  Var affine(Var params, int weight_offset, int bias_offset, int rows, int cols, Var x);
  Var tanh(Var a);
  // max(0, a); derivative at 0 is 0.
  Var relu(Var a);
  // Clamp to [lo, hi]; derivative is 0 on and outside the boundary.
  Var clamp(Var a, double lo, double hi);
  Var softmax(Var a);
  Var sum(Var a);
  Var index(Var a, int i);
  Var stack(std::span<const Var> scalars);

  // Seeds d(output)/d(output) = 1 and propagates adjoints to every node that
  // precedes `output`. `output` must be a scalar.
  void backward(Var output);

  std::span<const double> value(Var v) const;
  std::span<const double> adjoint(Var v) const;
  int size(Var v) const;

  // Smallest nonzero distance of any relu/clamp argument to its kink seen
  // since the last clear(). Exact zeros are skipped: those come from states
  // pinned at a bound, whose derivative is zero on both sides.
  double min_kink_distance() const { return min_kink_distance_; }

  std::size_t node_count() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int offset = 0;
    int size = 0;
    int rows = 0;
    int cols = 0;
    int aux0 = 0;
    int aux1 = 0;
    double c0 = 0.0;
    double c1 = 0.0;
  };

  Var push(Node node);
  void check(Var v) const;
  void note_kink(double distance);
  void accumulate(const Node& node);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<int> stack_inputs_;
  double min_kink_distance_ = std::numeric_limits<double>::infinity();
};

inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
inline Var operator*(Var a, double c) { return a.tape()->scale(a, c); }
inline Var operator*(double c, Var a) { return a.tape()->scale(a, c); }
inline Var operator/(Var a, double c) { return a.tape()->div(a, c); }
inline Var operator+(Var a, double c) { return a.tape()->shift(a, c); }
inline Var operator+(double c, Var a) { return a.tape()->shift(a, c); }
inline Var operator-(Var a, double c) { return a.tape()->shift(a, -c); }
inline Var operator-(double c, Var a) { return a.tape()->rsub(c, a); }

inline Var relu(Var a) { return a.tape()->relu(a); }
inline Var clamp_range(Var a, double lo, double hi) { return a.tape()->clamp(a, lo, hi); }
inline double value_of(Var a) { return a.value(); }

}  // namespace paycheck::ad

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"

#include "qfolio/kernels.hpp"
#include "qfolio/qubo.hpp"

namespace qfolio {

inline constexpr std::size_t kMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;

using cplx = std::complex<double>;

enum class GateKind { RX, RY, RZ, H, CX, CZ, DiagonalPhase };

std::string_view to_string(GateKind kind) noexcept;

/// One circuit instruction. Rotation angles are either fixed (`slot < 0`,
/// value `angle`) or bound at apply time as `scale * params[slot]`.
struct Gate {
  GateKind kind = GateKind::H;
  std::array<std::size_t, 2> qubits{};  // [target] | [control, target] | [a, b]
  int slot = -1;
  double scale = 1.0;
  double angle = 0.0;
  /// DiagonalPhase only: E(z) for every basis index; the gate applies exp(-i*gamma*E(z)).
  std::shared_ptr<const std::vector<double>> diagonal;

  static Gate rx(std::size_t q, int slot, double scale = 1.0) { return rotation(GateKind::RX, q, slot, scale); }
  static Gate ry(std::size_t q, int slot, double scale = 1.0) { return rotation(GateKind::RY, q, slot, scale); }
  static Gate rz(std::size_t q, int slot, double scale = 1.0) { return rotation(GateKind::RZ, q, slot, scale); }
  static Gate fixed(GateKind kind, std::size_t q, double angle);
  static Gate h(std::size_t q);
  static Gate cx(std::size_t control, std::size_t target);
  static Gate cz(std::size_t a, std::size_t b);
  static Gate diagonal_phase(std::shared_ptr<const std::vector<double>> table, int slot, double scale = 1.0);

  bool is_two_qubit() const noexcept { return kind == GateKind::CX || kind == GateKind::CZ; }
  bool is_parameterized() const noexcept { return slot >= 0; }

  /// Angle after binding; throws UnboundParameter if the slot is out of range.
  double bound_angle(std::span<const double> params) const;

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.kind == b.kind && a.qubits == b.qubits && a.slot == b.slot && a.scale == b.scale &&
           a.angle == b.angle && a.diagonal == b.diagonal;
  }

 private:
  static Gate rotation(GateKind kind, std::size_t q, int slot, double scale);
};

class StateVector {
 public:
  /// |0...0>. Throws TooManyQubits unless 1 <= n <= kMaxQubits.
  static StateVector zero(std::size_t n);
  /// 2^{-n/2} sum_z |z>.
  static StateVector uniform(std::size_t n);

  std::size_t qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> amplitudes() noexcept { return amps_; }

  void reset_zero();
  void reset_uniform();

  /// Kernel table used by this state; defaults to kernels::active().
  const kernels::KernelTable& kernel_table() const noexcept { return *kernels_; }
  void use_kernels(const kernels::KernelTable& table) noexcept { kernels_ = &table; }

  double norm_sq() const;
  std::vector<double> probabilities() const;

  /// Applies the gate in place with the given parameter binding.
  void apply(const Gate& gate, std::span<const double> params = {});

 private:
  explicit StateVector(std::size_t n);

  std::size_t n_ = 0;
  std::vector<cplx> amps_;
  std::vector<cplx> scratch_;
  const kernels::KernelTable* kernels_;
};

inline StateVector init_zero(std::size_t n) { return StateVector::zero(n); }
inline StateVector init_uniform(std::size_t n) { return StateVector::uniform(n); }

/// Throws IndexOutOfRange for bad qubit indices and UnboundParameter for
/// missing bindings.
inline void apply_gate(StateVector& state, const Gate& gate, std::span<const double> params = {}) {
  state.apply(gate, params);
}

/// Exact <psi|H|psi> for a Z-diagonal Hamiltonian.
double expectation_diagonal(const StateVector& state, const IsingHamiltonian& ham);
/// Same with a precomputed per-index value table of length 2^n.
double expectation_diagonal(const StateVector& state, std::span<const double> table);

/// Shot counts keyed by integer encoding of the measured bitstring.
struct SampleHistogram {
  std::size_t n = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  double probability(std::uint64_t bits) const;
  friend bool operator==(const SampleHistogram&, const SampleHistogram&) = default;
};

/// `shots` independent Born-rule draws using xoshiro256** seeded with `seed`.
/// Throws ZeroShots when shots == 0.
SampleHistogram sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);
/// Same from an explicit probability vector of length 2^n.
SampleHistogram sample_probabilities(std::span<const double> probs, std::size_t n, std::uint64_t shots,
                                     std::uint64_t seed);

/// sum_z (count_z / shots) * qubo_cost(z). Throws LengthMismatch if n differs.
double sampled_cost(const SampleHistogram& hist, const QuboProblem& problem);

void to_json(nlohmann::json& j, const SampleHistogram& h);
void from_json(const nlohmann::json& j, SampleHistogram& h);

}  // namespace qfolio

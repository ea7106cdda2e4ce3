#pragma once

#include "lrcast/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

// Random linear network coding over GF(2^8), reduction polynomial
// x^8 + x^4 + x^3 + x^2 + 1 (0x11D).
namespace lrcast::rlnc {

using Symbol = std::uint8_t;
using Bytes = std::vector<Symbol>;

inline constexpr unsigned kPolynomial = 0x11D;

inline Symbol gf_add(Symbol a, Symbol b) { return a ^ b; }
Symbol gf_mul(Symbol a, Symbol b);
/// Throws std::domain_error for 0.
Symbol gf_inv(Symbol a);

/// dst[i] ^= factor * src[i]
void gf_axpy(std::span<Symbol> dst, std::span<const Symbol> src, Symbol factor);
/// dst[i] = factor * dst[i]
void gf_scale(std::span<Symbol> dst, Symbol factor);

struct CodedPacket {
  int batch = 0;
  Bytes coefficients;  // one per source packet of the batch
  Bytes payload;
};

/// Linear combination of `sources` with the given coefficients.
CodedPacket combine(int batch, std::span<const Bytes> sources, std::span<const Symbol> coefficients);

/// Uniform random nonzero coefficient vector, then combine().
CodedPacket encode(int batch, std::span<const Bytes> sources, Engine& engine);

class BatchMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Online Gauss-Jordan decoder for one batch. Stored rows stay in reduced
/// row-echelon form after every ingest, so recovery is a permutation.
class Decoder {
public:
  Decoder(int batch, int window, std::size_t payload_len);

  int batch() const { return batch_; }
  int window() const { return window_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  bool decodable() const { return rank() == window_; }

  /// Returns true iff the packet raised the rank. Non-innovative packets leave
  /// the decoder untouched. Throws BatchMismatch for a packet of another batch.
  bool ingest(const CodedPacket& packet);

  /// Source packets in order. Throws std::logic_error when rank < window.
  std::vector<Bytes> recover() const;

private:
  struct Row {
    int pivot;
    Bytes coefficients;
    Bytes payload;
  };

  int batch_;
  int window_;
  std::size_t payload_len_;
  std::vector<Row> rows_;
  std::vector<int> row_of_pivot_;  // -1 where no pivot
};

struct CodecValidation {
  std::uint64_t batches = 0;
  std::uint64_t round_trips_ok = 0;
  std::uint64_t packets_received = 0;
  double mean_extra_packets = 0.0;  // beyond the window, per batch

  double success_rate() const {
    return batches == 0 ? 1.0 : static_cast<double>(round_trips_ok) / static_cast<double>(batches);
  }
};

/// Encodes random batches until each decodes, checking byte-exact recovery.
/// Batch i draws from derive_seed(seed, i); the result does not depend on
/// `threads`.
CodecValidation validate_codec(int window, std::size_t payload_len, std::uint64_t batches,
                               std::uint64_t seed, unsigned threads = 1);

}  // namespace lrcast::rlnc

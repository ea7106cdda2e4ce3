#include "lrcast/rlnc.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <thread>

namespace lrcast::rlnc {

namespace {

struct Tables {
  std::array<Symbol, 512> exp{};
  std::array<int, 256> log{};
  std::array<std::array<Symbol, 256>, 256> mul{};

  Tables() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<Symbol>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= kPolynomial;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    for (int a = 1; a < 256; ++a)
      for (int b = 1; b < 256; ++b) mul[a][b] = exp[log[a] + log[b]];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

Symbol gf_mul(Symbol a, Symbol b) { return tables().mul[a][b]; }

Symbol gf_inv(Symbol a) {
  if (a == 0) throw std::domain_error("zero has no inverse in GF(256)");
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

void gf_axpy(std::span<Symbol> dst, std::span<const Symbol> src, Symbol factor) {
  if (factor == 0) return;
  const auto& row = tables().mul[factor];
  const std::size_t n = std::min(dst.size(), src.size());
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

void gf_scale(std::span<Symbol> dst, Symbol factor) {
  const auto& row = tables().mul[factor];
  for (auto& s : dst) s = row[s];
}

CodedPacket combine(int batch, std::span<const Bytes> sources, std::span<const Symbol> coefficients) {
  if (sources.empty()) throw std::invalid_argument("no source packets");
  if (coefficients.size() != sources.size())
    throw std::invalid_argument("coefficient count differs from source count");
  const std::size_t len = sources.front().size();
  for (const auto& s : sources)
    if (s.size() != len) throw std::invalid_argument("source packets differ in length");

  CodedPacket pkt{batch, Bytes(coefficients.begin(), coefficients.end()), Bytes(len, 0)};
  for (std::size_t i = 0; i < sources.size(); ++i) gf_axpy(pkt.payload, sources[i], coefficients[i]);
  return pkt;
}

CodedPacket encode(int batch, std::span<const Bytes> sources, Engine& engine) {
  if (sources.empty()) throw std::invalid_argument("no source packets");
  Bytes coeffs(sources.size());
  do {
    for (auto& c : coeffs) c = static_cast<Symbol>(engine() >> 56);
  } while (std::all_of(coeffs.begin(), coeffs.end(), [](Symbol c) { return c == 0; }));
  return combine(batch, sources, coeffs);
}

Decoder::Decoder(int batch, int window, std::size_t payload_len)
    : batch_(batch), window_(window), payload_len_(payload_len),
      row_of_pivot_(static_cast<std::size_t>(window), -1) {
  if (window <= 0) throw std::invalid_argument("window must be positive");
  rows_.reserve(static_cast<std::size_t>(window));
}

bool Decoder::ingest(const CodedPacket& packet) {
  if (packet.batch != batch_)
    throw BatchMismatch("packet for batch " + std::to_string(packet.batch) +
                        " offered to decoder of batch " + std::to_string(batch_));
  if (packet.coefficients.size() != static_cast<std::size_t>(window_) ||
      packet.payload.size() != payload_len_)
    throw std::invalid_argument("coded packet has the wrong shape");
  if (decodable()) return false;

  Row row{-1, packet.coefficients, packet.payload};
  for (int col = 0; col < window_; ++col) {
    const int r = row_of_pivot_[col];
    const Symbol c = row.coefficients[col];
    if (r < 0 || c == 0) continue;
    gf_axpy(row.coefficients, rows_[r].coefficients, c);
    gf_axpy(row.payload, rows_[r].payload, c);
  }

  const auto it = std::find_if(row.coefficients.begin(), row.coefficients.end(),
                               [](Symbol c) { return c != 0; });
  if (it == row.coefficients.end()) return false;
  row.pivot = static_cast<int>(it - row.coefficients.begin());

  const Symbol inv = gf_inv(*it);
  gf_scale(row.coefficients, inv);
  gf_scale(row.payload, inv);

  for (auto& other : rows_) {
    const Symbol c = other.coefficients[row.pivot];
    if (c == 0) continue;
    gf_axpy(other.coefficients, row.coefficients, c);
    gf_axpy(other.payload, row.payload, c);
  }

  row_of_pivot_[row.pivot] = static_cast<int>(rows_.size());
  rows_.push_back(std::move(row));
  return true;
}

std::vector<Bytes> Decoder::recover() const {
  if (!decodable())
    throw std::logic_error("cannot recover batch at rank " + std::to_string(rank()) + " of " +
                           std::to_string(window_));
  std::vector<Bytes> out;
  out.reserve(rows_.size());
  for (int col = 0; col < window_; ++col) out.push_back(rows_[row_of_pivot_[col]].payload);
  return out;
}

namespace {

struct BatchOutcome {
  bool ok = false;
  std::uint64_t packets = 0;
};

BatchOutcome run_batch(int window, std::size_t payload_len, std::uint64_t seed) {
  Engine engine(seed);
  std::vector<Bytes> sources(static_cast<std::size_t>(window), Bytes(payload_len));
  for (auto& s : sources)
    for (auto& b : s) b = static_cast<Symbol>(engine() >> 56);

  Decoder decoder(0, window, payload_len);
  BatchOutcome out;
  while (!decoder.decodable()) {
    decoder.ingest(encode(0, sources, engine));
    ++out.packets;
  }
  out.ok = decoder.recover() == sources;
  return out;
}

}  // namespace

CodecValidation validate_codec(int window, std::size_t payload_len, std::uint64_t batches,
                               std::uint64_t seed, unsigned threads) {
  if (window <= 0) throw std::invalid_argument("window must be positive");
  if (payload_len == 0) throw std::invalid_argument("payload length must be positive");

  std::vector<BatchOutcome> outcomes(batches);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(1, batches))));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t i = w; i < batches; i += workers)
          outcomes[i] = run_batch(window, payload_len, derive_seed(seed, i));
      });
  }

  CodecValidation v;
  v.batches = batches;
  for (const auto& o : outcomes) {
    v.round_trips_ok += o.ok ? 1 : 0;
    v.packets_received += o.packets;
  }
  if (batches > 0)
    v.mean_extra_packets =
        static_cast<double>(v.packets_received - batches * static_cast<std::uint64_t>(window)) /
        static_cast<double>(batches);
  return v;
}

}  // namespace lrcast::rlnc

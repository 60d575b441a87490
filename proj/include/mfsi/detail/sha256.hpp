#pragma once

// Compact SHA-256 used for manifest checksums (FIPS 180-4 test vectors are
// covered in the pipeline tests).

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace mfsi::detail {

class Sha256 {
 public:
  Sha256() { reset(); }

  void reset() {
    state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
              0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    buffer_len_ = 0;
    total_bits_ = 0;
  }

  void update(const void* data, std::size_t len) {
    total_bits_ += static_cast<std::uint64_t>(len) * 8;
    absorb(static_cast<const std::uint8_t*>(data), len);
  }

  std::string hex_digest() {
    const std::uint64_t bits = total_bits_;
    std::uint8_t pad[72];
    std::size_t padlen = 0;
    pad[padlen++] = 0x80;
    while ((buffer_len_ + padlen) % 64 != 56) pad[padlen++] = 0;
    for (int i = 0; i < 8; ++i)
      pad[padlen++] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    absorb(pad, padlen);
    static const char* hexd = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint32_t w : state_) {
      for (int i = 28; i >= 0; i -= 4) out.push_back(hexd[(w >> i) & 0xF]);
    }
    return out;
  }

 private:
  void absorb(const std::uint8_t* p, std::size_t len) {
    while (len > 0) {
      const std::size_t take = std::min(len, sizeof(buffer_) - buffer_len_);
      std::memcpy(buffer_ + buffer_len_, p, take);
      buffer_len_ += take;
      p += take;
      len -= take;
      if (buffer_len_ == sizeof(buffer_)) {
        process_block(buffer_);
        buffer_len_ = 0;
      }
    }
  }

  static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void process_block(const std::uint8_t* block) {
    static constexpr std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto st = state_;
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(st[4], 6) ^ rotr(st[4], 11) ^ rotr(st[4], 25);
      const std::uint32_t ch = (st[4] & st[5]) ^ (~st[4] & st[6]);
      const std::uint32_t t1 = st[7] + s1 + ch + k[i] + w[i];
      const std::uint32_t s0 = rotr(st[0], 2) ^ rotr(st[0], 13) ^ rotr(st[0], 22);
      const std::uint32_t maj = (st[0] & st[1]) ^ (st[0] & st[2]) ^ (st[1] & st[2]);
      const std::uint32_t t2 = s0 + maj;
      st[7] = st[6];
      st[6] = st[5];
      st[5] = st[4];
      st[4] = st[3] + t1;
      st[3] = st[2];
      st[2] = st[1];
      st[1] = st[0];
      st[0] = t1 + t2;
    }
    for (int i = 0; i < 8; ++i) state_[i] += st[i];
  }

  std::array<std::uint32_t, 8> state_;
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
  std::uint64_t total_bits_ = 0;
};

inline std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex_digest();
}

}  // namespace mfsi::detail

#include "silentflow/aes.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define SILENTFLOW_HAVE_X86 1
#endif

namespace silentflow {
namespace {

constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) p ^= a;
    const bool carry = a & 0x80;
    a = static_cast<std::uint8_t>(a << 1);
    if (carry) a ^= 0x1b;
    b >>= 1;
  }
  return p;
}

constexpr std::uint8_t gf_inv(std::uint8_t a) {
  if (a == 0) return 0;
  // a^254 = a^-1 in GF(2^8)
  std::uint8_t result = 1;
  std::uint8_t base = a;
  for (int e = 254; e > 0; e >>= 1) {
    if (e & 1) result = gf_mul(result, base);
    base = gf_mul(base, base);
  }
  return result;
}

constexpr std::uint8_t rotl8(std::uint8_t x, int r) {
  return static_cast<std::uint8_t>((x << r) | (x >> (8 - r)));
}

constexpr std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> s{};
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t b = gf_inv(static_cast<std::uint8_t>(i));
    s[i] = static_cast<std::uint8_t>(b ^ rotl8(b, 1) ^ rotl8(b, 2) ^ rotl8(b, 3) ^ rotl8(b, 4) ^
                                     0x63);
  }
  return s;
}

constexpr std::uint32_t rotr32(std::uint32_t x, int r) { return (x >> r) | (x << (32 - r)); }

struct Tables {
  std::array<std::uint8_t, 256> sbox;
  std::array<std::array<std::uint32_t, 256>, 4> te;
};

constexpr Tables make_tables() {
  Tables t{};
  t.sbox = make_sbox();
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t s = t.sbox[i];
    const std::uint32_t w = (static_cast<std::uint32_t>(gf_mul(s, 2)) << 24) |
                            (static_cast<std::uint32_t>(s) << 16) |
                            (static_cast<std::uint32_t>(s) << 8) |
                            static_cast<std::uint32_t>(gf_mul(s, 3));
    t.te[0][i] = w;
    t.te[1][i] = rotr32(w, 8);
    t.te[2][i] = rotr32(w, 16);
    t.te[3][i] = rotr32(w, 24);
  }
  return t;
}

constexpr Tables kTables = make_tables();
static_assert(kTables.sbox[0x00] == 0x63 && kTables.sbox[0x53] == 0xed);

std::uint32_t load_be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void store_be32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t sub_word(std::uint32_t w) {
  const auto& s = kTables.sbox;
  return (static_cast<std::uint32_t>(s[w >> 24]) << 24) |
         (static_cast<std::uint32_t>(s[(w >> 16) & 0xff]) << 16) |
         (static_cast<std::uint32_t>(s[(w >> 8) & 0xff]) << 8) |
         static_cast<std::uint32_t>(s[w & 0xff]);
}

Block128 encrypt_one_table(const std::array<std::uint32_t, 44>& rk, const Block128& in) {
  const auto& te = kTables.te;
  const auto& sb = kTables.sbox;
  const auto bytes = in.to_bytes();
  std::uint32_t s0 = load_be32(bytes.data()) ^ rk[0];
  std::uint32_t s1 = load_be32(bytes.data() + 4) ^ rk[1];
  std::uint32_t s2 = load_be32(bytes.data() + 8) ^ rk[2];
  std::uint32_t s3 = load_be32(bytes.data() + 12) ^ rk[3];

  for (int r = 1; r < 10; ++r) {
    const std::uint32_t* k = rk.data() + 4 * r;
    const std::uint32_t t0 = te[0][s0 >> 24] ^ te[1][(s1 >> 16) & 0xff] ^
                             te[2][(s2 >> 8) & 0xff] ^ te[3][s3 & 0xff] ^ k[0];
    const std::uint32_t t1 = te[0][s1 >> 24] ^ te[1][(s2 >> 16) & 0xff] ^
                             te[2][(s3 >> 8) & 0xff] ^ te[3][s0 & 0xff] ^ k[1];
    const std::uint32_t t2 = te[0][s2 >> 24] ^ te[1][(s3 >> 16) & 0xff] ^
                             te[2][(s0 >> 8) & 0xff] ^ te[3][s1 & 0xff] ^ k[2];
    const std::uint32_t t3 = te[0][s3 >> 24] ^ te[1][(s0 >> 16) & 0xff] ^
                             te[2][(s1 >> 8) & 0xff] ^ te[3][s2 & 0xff] ^ k[3];
    s0 = t0;
    s1 = t1;
    s2 = t2;
    s3 = t3;
  }

  auto last = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return (static_cast<std::uint32_t>(sb[a >> 24]) << 24) |
           (static_cast<std::uint32_t>(sb[(b >> 16) & 0xff]) << 16) |
           (static_cast<std::uint32_t>(sb[(c >> 8) & 0xff]) << 8) |
           static_cast<std::uint32_t>(sb[d & 0xff]);
  };
  // SubBytes/ShiftRows first, final round-key addition last.
  std::uint32_t o0 = last(s0, s1, s2, s3);
  std::uint32_t o1 = last(s1, s2, s3, s0);
  std::uint32_t o2 = last(s2, s3, s0, s1);
  std::uint32_t o3 = last(s3, s0, s1, s2);
  o0 ^= rk[40];
  o1 ^= rk[41];
  o2 ^= rk[42];
  o3 ^= rk[43];

  std::array<std::uint8_t, 16> out{};
  store_be32(out.data(), o0);
  store_be32(out.data() + 4, o1);
  store_be32(out.data() + 8, o2);
  store_be32(out.data() + 12, o3);
  return Block128::from_bytes(out);
}

#ifdef SILENTFLOW_HAVE_X86
__attribute__((target("aes,sse2"))) void encrypt_aesni(const std::array<Block128, 11>& keys,
                                                       std::span<const Block128> in,
                                                       std::span<Block128> out) {
  __m128i rk[11];
  for (int r = 0; r < 11; ++r) {
    rk[r] = _mm_load_si128(reinterpret_cast<const __m128i*>(&keys[r]));
  }
  constexpr std::size_t kLanes = 8;
  const std::size_t n = in.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m128i x[kLanes];
    for (std::size_t j = 0; j < kLanes; ++j) {
      x[j] = _mm_xor_si128(_mm_load_si128(reinterpret_cast<const __m128i*>(&in[i + j])), rk[0]);
    }
    for (int r = 1; r < 10; ++r) {
      for (std::size_t j = 0; j < kLanes; ++j) x[j] = _mm_aesenc_si128(x[j], rk[r]);
    }
    for (std::size_t j = 0; j < kLanes; ++j) {
      _mm_store_si128(reinterpret_cast<__m128i*>(&out[i + j]),
                      _mm_aesenclast_si128(x[j], rk[10]));
    }
  }
  for (; i < n; ++i) {
    __m128i x = _mm_xor_si128(_mm_load_si128(reinterpret_cast<const __m128i*>(&in[i])), rk[0]);
    for (int r = 1; r < 10; ++r) x = _mm_aesenc_si128(x, rk[r]);
    _mm_store_si128(reinterpret_cast<__m128i*>(&out[i]), _mm_aesenclast_si128(x, rk[10]));
  }
}
#endif

}  // namespace

bool Aes128::aesni_available() {
#ifdef SILENTFLOW_HAVE_X86
  static const bool available = __builtin_cpu_supports("aes") != 0;
  return available;
#else
  return false;
#endif
}

Aes128::Aes128(const Block128& key, AesBackend backend) {
  if (backend == AesBackend::kAuto) {
    backend = aesni_available() ? AesBackend::kAesNi : AesBackend::kTable;
  }
  if (backend == AesBackend::kAesNi && !aesni_available()) {
    throw std::invalid_argument("AES-NI backend requested but not supported by this CPU");
  }
  backend_ = backend;

  const auto kb = key.to_bytes();
  for (int i = 0; i < 4; ++i) round_words_[i] = load_be32(kb.data() + 4 * i);
  std::uint32_t rcon = 0x01;
  for (int i = 4; i < 44; ++i) {
    std::uint32_t temp = round_words_[i - 1];
    if (i % 4 == 0) {
      temp = sub_word((temp << 8) | (temp >> 24)) ^ (rcon << 24);
      rcon = gf_mul(static_cast<std::uint8_t>(rcon), 2);
    }
    round_words_[i] = round_words_[i - 4] ^ temp;
  }
  for (int r = 0; r < 11; ++r) {
    std::array<std::uint8_t, 16> bytes{};
    for (int c = 0; c < 4; ++c) store_be32(bytes.data() + 4 * c, round_words_[4 * r + c]);
    round_keys_[r] = Block128::from_bytes(bytes);
  }
}

Block128 Aes128::encrypt(const Block128& in) const {
  Block128 out;
  encrypt_blocks(std::span(&in, 1), std::span(&out, 1));
  return out;
}

void Aes128::encrypt_table(std::span<const Block128> in, std::span<Block128> out) const {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = encrypt_one_table(round_words_, in[i]);
}

void Aes128::encrypt_blocks(std::span<const Block128> in, std::span<Block128> out) const {
  if (in.size() != out.size()) {
    throw std::invalid_argument("Aes128::encrypt_blocks: size mismatch");
  }
#ifdef SILENTFLOW_HAVE_X86
  if (backend_ == AesBackend::kAesNi) {
    encrypt_aesni(round_keys_, in, out);
    return;
  }
#endif
  encrypt_table(in, out);
}

}  // namespace silentflow

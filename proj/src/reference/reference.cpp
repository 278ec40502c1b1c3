#include "silentflow/reference/reference.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "silentflow/prims.hpp"

namespace silentflow::reference {
namespace {

using State = std::array<std::uint8_t, 16>;

std::uint8_t xtime(std::uint8_t a) {
  return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0));
}

std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b != 0) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

std::uint8_t sbox(std::uint8_t x) {
  // x^254 is the inverse in GF(2^8), with 0 -> 0.
  std::uint8_t inv = 1;
  for (int i = 0; i < 254; ++i) inv = gmul(inv, x);
  if (x == 0) inv = 0;
  std::uint8_t out = 0x63;
  for (int r = 0; r < 5; ++r) {
    out ^= static_cast<std::uint8_t>((inv << r) | (inv >> (8 - r)));
  }
  return out;
}

const std::array<std::uint8_t, 256>& sbox_table() {
  static const std::array<std::uint8_t, 256> t = [] {
    std::array<std::uint8_t, 256> s{};
    for (int i = 0; i < 256; ++i) s[i] = sbox(static_cast<std::uint8_t>(i));
    return s;
  }();
  return t;
}

std::array<State, 11> key_schedule(const State& key) {
  const auto& s = sbox_table();
  std::array<State, 11> rk{};
  rk[0] = key;
  std::uint8_t rcon = 1;
  for (int r = 1; r <= 10; ++r) {
    const State& p = rk[r - 1];
    State& k = rk[r];
    std::array<std::uint8_t, 4> t = {s[p[13]], s[p[14]], s[p[15]], s[p[12]]};
    t[0] ^= rcon;
    rcon = xtime(rcon);
    for (int i = 0; i < 4; ++i) k[i] = p[i] ^ t[i];
    for (int i = 4; i < 16; ++i) k[i] = p[i] ^ k[i - 4];
  }
  return rk;
}

State to_state(const Block128& b) {
  const auto bytes = b.to_bytes();
  State s;
  std::copy(bytes.begin(), bytes.end(), s.begin());
  return s;
}

Block128 from_state(const State& s) { return Block128::from_bytes(s); }

}  // namespace

Block128 aes128_encrypt(const Block128& key, const Block128& plaintext) {
  const auto& sb = sbox_table();
  const auto rk = key_schedule(to_state(key));
  State st = to_state(plaintext);
  for (int i = 0; i < 16; ++i) st[i] ^= rk[0][i];
  for (int round = 1; round <= 10; ++round) {
    for (auto& b : st) b = sb[b];
    // Byte i sits at row i % 4, column i / 4; row r rotates left by r.
    State shifted;
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) shifted[4 * c + r] = st[4 * ((c + r) % 4) + r];
    }
    st = shifted;
    if (round != 10) {
      for (int c = 0; c < 4; ++c) {
        const std::uint8_t a0 = st[4 * c], a1 = st[4 * c + 1], a2 = st[4 * c + 2], a3 = st[4 * c + 3];
        st[4 * c] = gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3;
        st[4 * c + 1] = a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3;
        st[4 * c + 2] = a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3);
        st[4 * c + 3] = gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2);
      }
    }
    for (int i = 0; i < 16; ++i) st[i] ^= rk[round][i];
  }
  return from_state(st);
}

namespace {

const Block128 kKey = Block128::from_hex("000102030405060708090a0b0c0d0e0f");

Block128 pi(const Block128& x) { return aes128_encrypt(kKey, x); }

}  // namespace

std::pair<Block128, Block128> prg(const Block128& seed) {
  const Block128 c{1, 0};
  return {pi(seed) ^ seed, pi(seed ^ c) ^ seed ^ c};
}

Block128 hash(const Block128& x, std::uint64_t tweak) {
  const Block128 px = pi(x);
  return pi(px ^ Block128{tweak, std::uint64_t{1} << 63}) ^ px;
}

std::vector<Block128> ggm_leaves(const Block128& root, std::uint32_t h) {
  if (h == 0) return {root};
  const auto [l, r] = prg(root);
  std::vector<Block128> out = ggm_leaves(l, h - 1);
  const std::vector<Block128> right = ggm_leaves(r, h - 1);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

std::uint64_t index_gen(const Block128& seed, std::uint64_t column, std::uint32_t lane,
                        std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  // Accept a 64-bit draw x when x lies in the top floor(2^64 / k)·k values.
  const unsigned __int128 span = static_cast<unsigned __int128>(1) << 64;
  const unsigned __int128 reject_below = span % k;
  for (std::uint64_t retry = 0;; ++retry) {
    const Block128 ctr{column, lane | (retry << 32)};
    const std::uint64_t x = pi(seed ^ ctr).hi;
    if (x >= reject_below) return x % k;
  }
}

std::vector<std::uint32_t> matrix_column(const Block128& seed, std::uint64_t k, std::uint64_t j,
                                         std::uint32_t d) {
  std::vector<std::uint32_t> col;
  for (std::uint32_t lane = 0; col.size() < d; ++lane) {
    const auto idx = static_cast<std::uint32_t>(reference::index_gen(seed, j, lane, k));
    if (std::find(col.begin(), col.end(), idx) == col.end()) col.push_back(idx);
  }
  return col;
}

std::vector<std::uint8_t> dense_matrix(const Block128& seed, std::uint64_t k, std::uint64_t n,
                                       std::uint32_t d) {
  std::vector<std::uint8_t> a(k * n, 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    for (auto i : matrix_column(seed, k, j, d)) a[i * n + j] = 1;
  }
  return a;
}

BitVec dense_vm_bits(const BitVec& u, const std::vector<std::uint8_t>& matrix, std::uint64_t k,
                     std::uint64_t n) {
  BitVec out(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    bool bit = false;
    for (std::uint64_t i = 0; i < k; ++i) bit ^= (u.get(i) && matrix[i * n + j]);
    out.set(j, bit);
  }
  return out;
}

std::vector<Block128> dense_vm_blocks(std::span<const Block128> x,
                                      const std::vector<std::uint8_t>& matrix, std::uint64_t k,
                                      std::uint64_t n) {
  std::vector<Block128> out(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    for (std::uint64_t i = 0; i < k; ++i) {
      if (matrix[i * n + j]) out[j] = out[j] ^ x[i];
    }
  }
  return out;
}

void expand_trees_serial(std::span<const Block128> roots, std::uint32_t h,
                         std::span<Block128> leaves) {
  if (leaves.size() != (roots.size() << h)) throw std::invalid_argument("leaf buffer size");
  std::vector<Block128> level;
  std::vector<Block128> next;
  for (std::size_t t = 0; t < roots.size(); ++t) {
    level.assign(1, roots[t]);
    for (std::uint32_t l = 0; l < h; ++l) {
      next.resize(level.size() * 2);
      for (std::size_t i = 0; i < level.size(); ++i) {
        const ChildPair c = prg_expand(level[i]);
        next[2 * i] = c.left;
        next[2 * i + 1] = c.right;
      }
      level.swap(next);
    }
    std::copy(level.begin(), level.end(), leaves.begin() + static_cast<std::ptrdiff_t>(t << h));
  }
}

std::vector<Block128> vm_blocks_serial(std::span<const Block128> x, const Block128& seed,
                                       std::uint64_t k, std::uint64_t n, std::uint32_t d) {
  std::vector<Block128> out(n);
  std::vector<std::uint32_t> col;
  for (std::uint64_t j = 0; j < n; ++j) {
    col.clear();
    for (std::uint32_t lane = 0; col.size() < d; ++lane) {
      const auto idx = static_cast<std::uint32_t>(silentflow::index_gen(seed, j, lane, k));
      if (std::find(col.begin(), col.end(), idx) == col.end()) col.push_back(idx);
    }
    for (auto i : col) out[j] = out[j] ^ x[i];
  }
  return out;
}

}  // namespace silentflow::reference

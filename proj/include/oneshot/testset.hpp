#pragma once
// The receiver's acceptance set over (m,n,z,e,f): recursive partition of
// [K]^2, per-slice construction from the restricted source, cardinality and
// tail diagnostics, and an exact verifier for every stated bound.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oneshot/extended.hpp"
#include "oneshot/info.hpp"

namespace oneshot {

// One axis interval {lo..hi} at a scaling level; width = K / s^{level+2}.
struct AxisCell {
  int level = 0;
  long lo = 0, hi = 0;
};

// Partition of [K]^2 into products of axis cells. Axis cells tile
// (K/s^{i+1}, K/s^i] for i = 0..c-1; the region with either coordinate
// <= K/s^c is left whole (it cannot meet the restricted support).
struct SquarePartition {
  long K = 0;
  int s = 0;       // 1/sqrt(delta)
  int c = 0;       // levels; smallest with s^c >= max(|M|,|N|) * s^2
  Rat delta;       // 1/s^2
  long inner_side = 0;  // K / s^c
  std::vector<AxisCell> axis;

  static SquarePartition build(long K, int s, int max_mn);

  long level_bound(int i) const;  // K / s^i
  long cell_width(int i) const;   // K / s^{i+2}
  // index into `axis`, or -1 when t <= inner_side
  int axis_cell_of(long t) const;
};

// Per-rectangle diagnostics for one (m,n,z) slice.
struct RectDiag {
  int ax = -1, bx = -1;  // axis cell ids (e side, f side)
  Rat pr_rect;           // Pr[(W,V) in rect | m,n,z]
  Rat region1_mass;      // E'F' mass of the rect's own cells
  Rat bad_mass;          // mass of the failed-tail cells outside the rect
  long a_card = 0;       // |A_rect|
};

struct SliceDiag {
  Rat pmnz;         // p(m,n,z)
  Rat pmn_given_z;  // p_{MN|Z=z}
  Rat good1_mass;   // Pr[Good1 | m,n,z] over (x,y)
  Rat good_mass;    // Pr[Good1 and Good2 | m,n,z]
  long a1_card = 0; // |A^(1)|
  std::vector<RectDiag> rects;
};

class Bitset2D {
 public:
  Bitset2D() = default;
  Bitset2D(long rows, long cols) : rows_(rows), cols_(cols), bits_((size_t(rows) * cols + 63) / 64, 0) {}
  void set(long r, long c) { bits_[pos(r, c) >> 6] |= 1ULL << (pos(r, c) & 63); }
  void clear(long r, long c) { bits_[pos(r, c) >> 6] &= ~(1ULL << (pos(r, c) & 63)); }
  bool test(long r, long c) const { return (bits_[pos(r, c) >> 6] >> (pos(r, c) & 63)) & 1; }
  long rows() const { return rows_; }
  long cols() const { return cols_; }
  long popcount() const;
  const std::vector<uint64_t>& words() const { return bits_; }
  std::vector<uint64_t>& words() { return bits_; }

 private:
  size_t pos(long r, long c) const { return size_t(r) * cols_ + c; }
  long rows_ = 0, cols_ = 0;
  std::vector<uint64_t> bits_;
};

struct TestSetOptions {
  // Exponent of delta in Good1's third condition (the provable variant is 4).
  int good1_delta_exponent = 4;
  // Enumeration cap on |M||N||Z| K^2.
  long budget = 1L << 26;
  int threads = 1;
};

struct TestSetA {
  long K = 0;
  Rat delta;
  Rate r1, r2;
  Rat dev;  // frozen log2(max(|M|,|N|)/delta)
  SquarePartition part;
  int m_size = 0, n_size = 0, z_size = 0;
  TestSetOptions opt;
  // final acceptance set per (m,n,z); (e,f) stored 0-based
  std::vector<Bitset2D> slices;
  std::vector<SliceDiag> diag;
  // Good (1 and 2) indicator per slice over (x,y)
  std::vector<std::vector<char>> good;

  size_t slice_index(int m, int n, int z) const {
    return (size_t(m) * n_size + n) * z_size + z;
  }
  // e,f are 1-based protocol values
  bool contains(int m, int n, int z, long e, long f) const {
    return slices[slice_index(m, n, z)].test(e - 1, f - 1);
  }
};

TestSetA build_test_set(const ExtendedSource& src, const Rate& r1, const Rate& r2,
                        const Rat& delta, const TestSetOptions& opt = {});

struct TestSetReport {
  Rat eps_used;            // 1 - Pr[Good1 event] over the joint
  Rat true_mass;           // Pr_{MNEFZ}[A]
  Rat cross_me_t;          // Pr_{MEZ x T}[A]
  Rat cross_s_nf;          // Pr_{S x NFZ}[A]
  Rat product_mass;        // Pr_{S x T x Z}[A]
  Rat bound_true;          // 1 - eps - 5 delta
  Rat bound_cross_me_t;    // delta 2^{R2} / |N|
  Rat bound_cross_s_nf;    // delta 2^{R1} / |M|
  Rat bound_product;       // delta 2^{R1+R2} / (|M||N|)
  Rat claim_good_mass;     // sum p(mnz) Pr[Good|mnz]
  Rat claim_good_bound;    // 1 - eps - 2 delta
  Rat max_region1_mass;    // worst per-square region-1 mass
  Rat max_bad_mass;        // worst per-square Bad mass
  bool a1_card_ok = true;     // |A^(1)| <= delta K^2 2^{R1+R2} p_{MN|Z} everywhere
  bool ok = false;
};

TestSetReport verify_test_set(const TestSetA& a, const ExtendedSource& src);

// JSON sidecar round-trip (membership data + parameters; diagnostics are
// rebuilt, not serialized). The content key hashes the inputs.
std::string testset_content_key(const ExtendedSource& src, const Rate& r1, const Rate& r2,
                                const Rat& delta);
void save_test_set(const TestSetA& a, const std::string& path, const std::string& content_key);
TestSetA load_test_set(const std::string& path, std::string* content_key = nullptr);

}  // namespace oneshot

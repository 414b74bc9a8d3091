#pragma once

#include <span>
#include <vector>

#include "cwpir/cw_code.hpp"
#include "cwpir/he.hpp"

namespace cwpir {

/// Bit-sliced SIMD batch: ciphertext j holds, in each slot, bit j of
/// that slot's element. Width is the element bit-length (or the code
/// length m for constant-weight operands).
struct BitSlicedBatch {
    std::vector<CipherValue> bits;
    unsigned width() const { return static_cast<unsigned>(bits.size()); }
};

/// Encodes one element per slot, bit-sliced. Elements must fit the
/// given width; slots beyond `elements` hold zero.
BitSlicedBatch encode_bit_sliced(const HeBackend& be, std::span<const u64> elements,
                                 unsigned width);

/// Same, for constant-weight codewords (width = code length).
BitSlicedBatch encode_codeword_batch(const HeBackend& be, std::span<const Codeword> elements,
                                     unsigned length);

/// Balanced product tree over the given values; (size-1)
/// multiplications at depth ceil(log2 size). When `lazy_root` is set
/// the final product may defer relinearization.
CipherValue product_tree(const HeBackend& be, std::vector<CipherValue> nodes,
                         bool lazy_root = false);

/// Equality against a public bitstring:
/// prod_{y[i]=0} (1 - x[i]) * prod_{y[i]=1} x[i].
CipherValue plain_folklore_eq(const HeBackend& be, const BitSlicedBatch& x,
                              std::span<const std::uint8_t> y_bits);

/// Equality between two encrypted operands:
/// prod_i (1 - (x[i]-y[i])^2).
CipherValue arith_folklore_eq(const HeBackend& be, const BitSlicedBatch& x,
                              const BitSlicedBatch& y);

/// Constant-weight equality against a public codeword:
/// prod_{y[j]=1} x[j]; k-1 multiplications, depth ceil(log2 k).
CipherValue plain_cw_eq(const HeBackend& be, const BitSlicedBatch& x, const Codeword& y,
                        bool lazy_root = false);

/// Constant-weight equality between two encrypted operands:
/// k' = sum_i x[i]*y[i];  e = (1/k!) * prod_{i in [k]} (k' - i).
CipherValue arith_cw_eq(const HeBackend& be, const BitSlicedBatch& x, const BitSlicedBatch& y,
                        unsigned k);

}  // namespace cwpir

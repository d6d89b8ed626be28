#pragma once

#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "offcbdc/mimc.hpp"

namespace offcbdc {

// Domain tags keep the commitment scheme and the three PRF roles disjoint:
// without them sn and ds would be the same function of (sk, ctr).
namespace domain {
inline const fr commitment = fr::from_u64(0x636d74ULL);  // "cmt"
inline const fr prf_id = fr::from_u64(0x696400ULL);      // "id"
inline const fr prf_sn = fr::from_u64(0x736e00ULL);      // "sn"
inline const fr prf_ds = fr::from_u64(0x647300ULL);      // "ds"
}  // namespace domain

// Hiding, binding commitment to an ordered tuple. The arity is absorbed into
// the hash so tuples of different lengths can never collide.
inline fr commit(const fr& blind, std::span<const fr> values) {
    if (values.empty()) throw std::invalid_argument("commit: empty value list");
    std::vector<fr> input;
    input.reserve(values.size() + 3);
    input.push_back(domain::commitment);
    input.push_back(fr::from_u64(values.size()));
    input.push_back(blind);
    input.insert(input.end(), values.begin(), values.end());
    return mimc_hash(input);
}

inline fr commit(const fr& blind, std::initializer_list<fr> values) {
    return commit(blind, std::span<const fr>(values.begin(), values.size()));
}

inline fr prf_id(const fr& sk) {
    const fr input[3] = {domain::prf_id, sk, fr::zero()};
    return mimc_hash(input);
}

inline fr prf_sn(const fr& sk, const fr& counter) {
    const fr input[3] = {domain::prf_sn, sk, counter};
    return mimc_hash(input);
}

inline fr prf_ds(const fr& sk, const fr& counter) {
    const fr input[3] = {domain::prf_ds, sk, counter};
    return mimc_hash(input);
}

}  // namespace offcbdc

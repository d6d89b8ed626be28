#pragma once

#include <span>
#include <vector>

#include "offcbdc/field.hpp"

namespace offcbdc {

// MiMC over the BN254 scalar field with the x^5 round function (5 is coprime
// to p-1 here, so the round map is a permutation). 110 rounds cover the
// 254-bit security margin for degree-5 rounds.
inline constexpr int mimc_rounds = 110;

const std::vector<fr>& mimc_round_constants();

// One block cipher call E_key(x).
fr mimc_encrypt(const fr& key, const fr& x);

// Miyaguchi-Preneel chaining of the cipher into a multi-input hash.
fr mimc_hash(std::span<const fr> inputs);

}  // namespace offcbdc

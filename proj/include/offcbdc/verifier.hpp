#pragma once

#include "offcbdc/history.hpp"

namespace offcbdc {

// Shared by payment recipients at accept time and by the settlement service
// during state recovery.
struct verify_context {
    const proof_backend* backend = nullptr;
    verifying_key bank_key;
    fr delta_sync;  // public slot of completion state proofs
};

// Bundle check used everywhere: right relation, exactly the expected public
// slots, and a verifying proof.
bool verify_bundle_against(const verify_context& ctx, const proof_bundle& b,
                           relation_id rel, const std::vector<fr>& expected_public);

// A single element whose dependency proof is present: state proof (and
// payment proof for completions) on its public slots plus the dependency
// proof against (bank key, dcm). Elements without a dependency proof fail.
bool verify_state(const verify_context& ctx, const history_element& e);

// Recursive history verification: short-circuits on a valid bank signature
// or dependency proof, otherwise checks the element's own proofs, recomputes
// the dependency commitment from the shipped openings, and recurses into the
// predecessor (and the sender's creation state for completions). Missing
// elements and cycles verify false.
bool verify_offline_creation(const verify_context& ctx, const related_history& h,
                             const fr& scm);
bool verify_offline_completion(const verify_context& ctx, const related_history& h,
                               const fr& scm);

}  // namespace offcbdc

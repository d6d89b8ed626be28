#include "offcbdc/verifier.hpp"

#include <set>

namespace offcbdc {

namespace {

struct walker {
    const verify_context& ctx;
    const related_history& hist;
    std::set<fr, fr_raw_less> visiting;

    bool check_creation(const fr& scm);
    bool check_completion(const fr& scm);
    bool descend(const fr& scm);  // dispatch on the target element's shape
};

std::vector<fr> pk_slots(const verify_context& ctx) {
    return {ctx.bank_key.point.x, ctx.bank_key.point.y};
}

bool leaf_valid(const verify_context& ctx, const signed_leaf& leaf) {
    return verify(ctx.bank_key, leaf.scm, leaf.sigma);
}

// Scoped visited-set marker; rejects cycles in adversarial histories.
struct visit_guard {
    std::set<fr, fr_raw_less>& set;
    fr scm;
    bool fresh;

    visit_guard(std::set<fr, fr_raw_less>& s, const fr& v) : set(s), scm(v) {
        fresh = set.insert(v).second;
    }
    ~visit_guard() {
        if (fresh) set.erase(scm);
    }
};

}  // namespace

bool verify_bundle_against(const verify_context& ctx, const proof_bundle& b,
                           relation_id rel, const std::vector<fr>& expected_public) {
    if (b.rel != rel) return false;
    if (b.pub.slots != expected_public) return false;
    return ctx.backend->verify(b);
}

bool verify_state(const verify_context& ctx, const history_element& e) {
    if (const auto* c = std::get_if<creation_with_dep>(&e)) {
        if (!verify_bundle_against(ctx, c->zkp_state, relation_id::create_state,
                                   {c->scm, c->dcm, c->sn, c->ds}))
            return false;
        auto dep_pub = pk_slots(ctx);
        dep_pub.push_back(c->dcm);
        return verify_bundle_against(ctx, c->zkp_dep, relation_id::create_dep,
                                     dep_pub);
    }
    if (const auto* c = std::get_if<completion_with_dep>(&e)) {
        if (!verify_bundle_against(ctx, c->zkp_state, relation_id::complete_state,
                                   {ctx.delta_sync, c->scm, c->dcm, c->pcm}))
            return false;
        if (!verify_bundle_against(ctx, c->zkp_pm, relation_id::payment, {c->pcm}))
            return false;
        auto dep_pub = pk_slots(ctx);
        dep_pub.push_back(c->dcm);
        return verify_bundle_against(ctx, c->zkp_dep, relation_id::complete_dep,
                                     dep_pub);
    }
    // leaves and openings-shaped elements carry no dependency proof
    return false;
}

namespace {

bool walker_check_creation_impl(walker& w, const fr& scm) {
    auto it = w.hist.find(scm);
    if (it == w.hist.end()) return false;  // incomplete related history
    const history_element& e = it->second;

    if (verify_state(w.ctx, e)) return true;
    if (const auto* leaf = std::get_if<signed_leaf>(&e))
        return leaf_valid(w.ctx, *leaf);

    const auto* c = std::get_if<creation_with_openings>(&e);
    if (!c) return false;  // wrong shape for a creation slot

    fr dcm = commit(c->blind_dep, {c->scm_prev});
    if (!verify_bundle_against(w.ctx, c->zkp_state, relation_id::create_state,
                               {c->scm, dcm, c->sn, c->ds}))
        return false;
    return w.descend(c->scm_prev);
}

bool walker_check_completion_impl(walker& w, const fr& scm) {
    auto it = w.hist.find(scm);
    if (it == w.hist.end()) return false;
    const history_element& e = it->second;

    if (verify_state(w.ctx, e)) return true;
    if (const auto* leaf = std::get_if<signed_leaf>(&e))
        return leaf_valid(w.ctx, *leaf);

    const auto* c = std::get_if<completion_with_openings>(&e);
    if (!c) return false;

    fr dcm = commit(c->blind_dep, {c->scm_prev, c->ccm});
    if (!verify_bundle_against(w.ctx, c->zkp_state, relation_id::complete_state,
                               {w.ctx.delta_sync, c->scm, dcm, c->pcm}))
        return false;
    if (!verify_bundle_against(w.ctx, c->zkp_pm, relation_id::payment, {c->pcm}))
        return false;
    // both dependencies must check out: own predecessor and the sender's
    // creation state
    if (!w.descend(c->scm_prev)) return false;
    return w.check_creation(c->ccm);
}

}  // namespace

bool walker::check_creation(const fr& scm) {
    visit_guard guard(visiting, scm);
    if (!guard.fresh) return false;  // cycle
    return walker_check_creation_impl(*this, scm);
}

bool walker::check_completion(const fr& scm) {
    visit_guard guard(visiting, scm);
    if (!guard.fresh) return false;
    return walker_check_completion_impl(*this, scm);
}

bool walker::descend(const fr& scm) {
    auto it = hist.find(scm);
    if (it == hist.end()) return false;
    if (element_is_completion_shape(it->second)) return check_completion(scm);
    return check_creation(scm);
}

bool verify_offline_creation(const verify_context& ctx, const related_history& h,
                             const fr& scm) {
    walker w{ctx, h, {}};
    return w.check_creation(scm);
}

bool verify_offline_completion(const verify_context& ctx, const related_history& h,
                               const fr& scm) {
    walker w{ctx, h, {}};
    return w.check_completion(scm);
}

}  // namespace offcbdc

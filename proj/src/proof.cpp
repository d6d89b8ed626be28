#include "offcbdc/proof.hpp"

#include <cstring>
#include <fstream>

#include "offcbdc/sha256.hpp"

namespace offcbdc {

namespace {

bytes bundle_context(relation_id rel, const public_inputs& pub) {
    byte_writer w;
    w.u8(static_cast<std::uint8_t>(rel));
    w.u16(static_cast<std::uint16_t>(pub.slots.size()));
    for (const fr& s : pub.slots) write_fr(w, s);
    return w.take();
}

void require_satisfied(relation_id rel, const public_inputs& pub,
                       const witness& wit) {
    if (auto violated = first_violation(rel, pub, wit))
        throw unsatisfied_witness(rel, *violated);
}

constexpr char pk_magic[8] = {'O', 'C', 'P', 'K', '0', '0', '0', '1'};
constexpr char vk_magic[8] = {'O', 'C', 'V', 'K', '0', '0', '0', '1'};

std::filesystem::path key_path(const std::filesystem::path& dir, relation_id rel,
                               bool proving) {
    return dir / (std::string(relation_name(rel)) +
                  (proving ? ".pk" : ".vk"));
}

void write_key_file(const std::filesystem::path& path, const char magic[8],
                    relation_id rel, std::span<const std::uint8_t> secret) {
    byte_writer w;
    w.raw({reinterpret_cast<const std::uint8_t*>(magic), 8});
    w.u8(static_cast<std::uint8_t>(rel));
    w.var_bytes(secret);
    bytes out = w.take();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write key file " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
}

std::array<std::uint8_t, 32> read_key_file(const std::filesystem::path& path,
                                           const char magic[8],
                                           relation_id expected_rel) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read key file " + path.string());
    bytes data((std::istreambuf_iterator<char>(f)),
               std::istreambuf_iterator<char>());
    byte_reader r(data);
    auto got_magic = r.raw(8);
    if (std::memcmp(got_magic.data(), magic, 8) != 0)
        throw std::runtime_error("bad key file header in " + path.string());
    auto rel = static_cast<relation_id>(r.u8());
    if (rel != expected_rel)
        throw std::runtime_error("key file relation mismatch in " + path.string());
    bytes secret = r.var_bytes(64);
    if (secret.size() != 32)
        throw std::runtime_error("bad key length in " + path.string());
    std::array<std::uint8_t, 32> out{};
    std::memcpy(out.data(), secret.data(), 32);
    return out;
}

}  // namespace

bytes proof_bundle::encode() const {
    byte_writer w;
    w.u8(static_cast<std::uint8_t>(rel));
    w.u16(static_cast<std::uint16_t>(pub.slots.size()));
    for (const fr& s : pub.slots) write_fr(w, s);
    w.var_bytes(proof);
    return w.take();
}

proof_bundle proof_bundle::decode(byte_reader& r) {
    std::size_t at = r.offset();
    std::uint8_t tag = r.u8();
    if (tag >= relation_count) throw decode_error(at, "unknown relation tag");
    proof_bundle b;
    b.rel = static_cast<relation_id>(tag);
    std::uint16_t n = r.u16();
    b.pub.slots.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) b.pub.slots.push_back(read_fr(r));
    b.proof = r.var_bytes(1u << 20);
    return b;
}

mock_backend::mock_backend(std::uint64_t seed) {
    rng r(seed ^ 0x6d6f636bULL);  // "mock"
    r.fill(key_);
}

proof_bundle mock_backend::prove(relation_id rel, const public_inputs& pub,
                                 const witness& wit) const {
    require_satisfied(rel, pub, wit);
    bytes ctx = bundle_context(rel, pub);
    digest32 mac = hmac_sha256(key_, ctx);
    return {rel, pub, bytes(mac.begin(), mac.end())};
}

bool mock_backend::verify(const proof_bundle& bundle) const {
    if (bundle.pub.slots.size() != public_arity(bundle.rel)) return false;
    if (bundle.proof.size() != 32) return false;
    bytes ctx = bundle_context(bundle.rel, bundle.pub);
    digest32 mac = hmac_sha256(key_, ctx);
    return std::memcmp(mac.data(), bundle.proof.data(), 32) == 0;
}

snark_backend::snark_backend(const std::filesystem::path& key_dir) {
    std::filesystem::create_directories(key_dir);
    for (int i = 0; i < relation_count; ++i) {
        auto rel = static_cast<relation_id>(i);
        auto pk_file = key_path(key_dir, rel, true);
        auto vk_file = key_path(key_dir, rel, false);
        if (!std::filesystem::exists(pk_file) ||
            !std::filesystem::exists(vk_file)) {
            auto r = rng::from_entropy();
            std::array<std::uint8_t, 32> secret{};
            r.fill(secret);
            write_key_file(pk_file, pk_magic, rel, secret);
            write_key_file(vk_file, vk_magic, rel, secret);
        }
        keys_[static_cast<std::size_t>(i)] = read_key_file(pk_file, pk_magic, rel);
        // the verifying key must agree with the proving key
        auto vk = read_key_file(vk_file, vk_magic, rel);
        if (vk != keys_[static_cast<std::size_t>(i)])
            throw std::runtime_error("proving/verifying key mismatch for " +
                                     std::string(relation_name(rel)));
    }
}

proof_bundle snark_backend::prove(relation_id rel, const public_inputs& pub,
                                  const witness& wit) const {
    require_satisfied(rel, pub, wit);
    bytes ctx = bundle_context(rel, pub);
    bytes proof;
    proof.reserve(proof_size);
    const auto& key = keys_[static_cast<std::size_t>(rel)];
    for (std::uint8_t block = 0; proof.size() < proof_size; ++block) {
        bytes input;
        input.push_back(block);
        input.insert(input.end(), ctx.begin(), ctx.end());
        digest32 mac = hmac_sha256(key, input);
        proof.insert(proof.end(), mac.begin(), mac.end());
    }
    return {rel, pub, std::move(proof)};
}

bool snark_backend::verify(const proof_bundle& bundle) const {
    if (bundle.pub.slots.size() != public_arity(bundle.rel)) return false;
    if (bundle.proof.size() != proof_size) return false;
    bytes ctx = bundle_context(bundle.rel, bundle.pub);
    const auto& key = keys_[static_cast<std::size_t>(bundle.rel)];
    for (std::uint8_t block = 0; block < proof_size / 32; ++block) {
        bytes input;
        input.push_back(block);
        input.insert(input.end(), ctx.begin(), ctx.end());
        digest32 mac = hmac_sha256(key, input);
        if (std::memcmp(mac.data(), bundle.proof.data() + 32 * block, 32) != 0)
            return false;
    }
    return true;
}

std::unique_ptr<proof_backend> make_backend(const std::string& which,
                                            std::uint64_t seed,
                                            const std::filesystem::path& key_dir) {
    if (which == "mock") return std::make_unique<mock_backend>(seed);
    if (which == "snark") return std::make_unique<snark_backend>(key_dir);
    throw std::invalid_argument("unknown backend '" + which +
                                "' (expected mock or snark)");
}

}  // namespace offcbdc

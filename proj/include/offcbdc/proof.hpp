#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "offcbdc/bytes.hpp"
#include "offcbdc/relations.hpp"
#include "offcbdc/rng.hpp"

namespace offcbdc {

// A proof for one relation instance: the claimed public inputs plus opaque
// proof bytes. Wire layout: relation tag (1) | slot count (2) | slots (32
// each) | proof length (4) | proof bytes.
struct proof_bundle {
    relation_id rel;
    public_inputs pub;
    bytes proof;

    bytes encode() const;
    static proof_bundle decode(byte_reader& r);

    bool operator==(const proof_bundle& o) const {
        return rel == o.rel && pub == o.pub && proof == o.proof;
    }
};

// Thrown when prove() is handed a witness that does not satisfy the relation.
// Proving never silently emits an invalid proof.
class unsatisfied_witness : public std::invalid_argument {
  public:
    unsatisfied_witness(relation_id rel, std::string_view constraint)
        : std::invalid_argument("witness does not satisfy " +
                                std::string(relation_name(rel)) +
                                ": constraint '" + std::string(constraint) +
                                "' violated"),
          rel_(rel),
          constraint_(constraint) {}

    relation_id rel() const { return rel_; }
    std::string_view constraint() const { return constraint_; }

  private:
    relation_id rel_;
    std::string constraint_;
};

class proof_backend {
  public:
    virtual ~proof_backend() = default;

    virtual std::string_view name() const = 0;

    // Checks the witness against the relation first and throws
    // unsatisfied_witness naming the violated constraint if it fails.
    virtual proof_bundle prove(relation_id rel, const public_inputs& pub,
                               const witness& wit) const = 0;

    // Deterministic; false for tampered public inputs, wrong relations, or
    // malformed proof bytes. Never throws.
    virtual bool verify(const proof_bundle& bundle) const = 0;
};

// Authenticated claims under a process-local key. Fast, but a proof is only
// evidence that *this process* checked the witness; adversarial soundness
// tests must not rely on it.
class mock_backend final : public proof_backend {
  public:
    explicit mock_backend(std::uint64_t seed);

    std::string_view name() const override { return "mock"; }
    proof_bundle prove(relation_id rel, const public_inputs& pub,
                       const witness& wit) const override;
    bool verify(const proof_bundle& bundle) const override;

  private:
    std::array<std::uint8_t, 32> key_{};
};

// Constant-size proofs bound to (relation, public inputs) under per-relation
// keys persisted on disk. Stands in for a pairing-based prover: the interface,
// key lifecycle, and proof shape match one, while soundness is
// designated-verifier (holders of the relation keys). Proof size is fixed at
// 128 bytes.
class snark_backend final : public proof_backend {
  public:
    static constexpr std::size_t proof_size = 128;

    // Loads keys from key_dir, generating and persisting them if absent.
    explicit snark_backend(const std::filesystem::path& key_dir);

    std::string_view name() const override { return "snark"; }
    proof_bundle prove(relation_id rel, const public_inputs& pub,
                       const witness& wit) const override;
    bool verify(const proof_bundle& bundle) const override;

  private:
    std::array<std::array<std::uint8_t, 32>, relation_count> keys_{};
};

std::unique_ptr<proof_backend> make_backend(const std::string& which,
                                            std::uint64_t seed,
                                            const std::filesystem::path& key_dir);

}  // namespace offcbdc

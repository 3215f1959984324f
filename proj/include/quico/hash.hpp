#pragma once

#include <vector>

#include "quico/bytes.hpp"

namespace quico {

/// SHA3-256 digest of `data`.
Hash32 sha3_256(BytesView data);

inline Hash32 sha3_256(const Bytes& data) { return sha3_256(BytesView{data.data(), data.size()}); }

/// One side of a Merkle proof step.
enum class ProofSide : uint8_t { Left = 0, Right = 1 };

struct ProofStep {
  Hash32 sibling;
  ProofSide side;  // where the sibling sits relative to the running hash
};

using MerkleProof = std::vector<ProofStep>;

/// Root of a binary Merkle tree over `leaves`.
/// A single leaf is its own root; an odd level duplicates its last node.
/// Throws Error("EmptyLeafSet") when `leaves` is empty.
Hash32 merkle_root(const std::vector<Hash32>& leaves);

/// Inclusion proof for leaves[index] against merkle_root(leaves).
MerkleProof merkle_proof(const std::vector<Hash32>& leaves, size_t index);

/// True iff `leaf` combined through `proof` reproduces `root`.
bool merkle_verify(const Hash32& leaf, const MerkleProof& proof, const Hash32& root);

/// Root recorded in headers of blocks with an empty body (domain-separated
/// constant, so an empty body can never alias a real transaction set).
Hash32 empty_body_root();

}  // namespace quico

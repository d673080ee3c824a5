#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace orchard {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const noexcept = 0;
    /// Deterministic; always returns `dimension()` components.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Hashed bag-of-tokens: lowercase alphanumeric tokens are hashed (FNV-1a)
/// into `dimension` non-negative counts, then L2-normalized. Fully offline,
/// and all cosines land in [0, 1].
class HashedBagEmbedder final : public Embedder {
public:
    explicit HashedBagEmbedder(std::size_t dimension = 256);
    std::size_t dimension() const noexcept override { return dimension_; }
    std::vector<double> embed(std::string_view text) const override;

private:
    std::size_t dimension_;
};

/// Cosine similarity. Two zero vectors are identical (1); one zero vector
/// against a non-zero one scores 0. Identical inputs give exactly 1.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Similarity oracle over raw text, as used by context truncation.
using RelevanceFn = std::function<double(std::string_view, std::string_view)>;

/// Cosine of the two texts' embeddings.
RelevanceFn embedding_relevance(const Embedder& embedder);

}  // namespace orchard

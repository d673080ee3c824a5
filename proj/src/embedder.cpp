#include "orchard/embedder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace orchard {

HashedBagEmbedder::HashedBagEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<double> HashedBagEmbedder::embed(std::string_view text) const {
    std::vector<double> v(dimension_, 0.0);
    std::uint64_t hash = 0;
    bool in_token = false;
    auto flush = [&] {
        if (in_token) v[hash % dimension_] += 1.0;
        in_token = false;
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (!in_token) hash = 14695981039346656037ull;
            hash ^= static_cast<unsigned char>(std::tolower(c));
            hash *= 1099511628211ull;
            in_token = true;
        } else {
            flush();
        }
    }
    flush();

    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): identical vectors give exactly 1.
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

RelevanceFn embedding_relevance(const Embedder& embedder) {
    return [&embedder](std::string_view a, std::string_view b) {
        return cosine_similarity(embedder.embed(a), embedder.embed(b));
    };
}

}  // namespace orchard

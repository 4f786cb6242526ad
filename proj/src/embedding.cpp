#include "pomp/embedding.hpp"

#include <cmath>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

EmbeddingPair IdenticalEmbedder::encode(std::string_view, std::string_view) {
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(dim_);
  return {v, v};
}

FixedSimilarityEmbedder::FixedSimilarityEmbedder(double similarity) : similarity_(similarity) {
  if (!(similarity >= -1.0 && similarity <= 1.0)) {
    throw Error(ErrorKind::invalid_config, "fixed similarity must lie in [-1, 1]");
  }
}

EmbeddingPair FixedSimilarityEmbedder::encode(std::string_view, std::string_view) {
  Eigen::Vector2d a(1.0, 0.0);
  Eigen::Vector2d b(similarity_, std::sqrt(1.0 - similarity_ * similarity_));
  return {a, b};
}

Eigen::VectorXd HashingEmbedder::embed(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  const std::string padded = " " + std::string(text) + " ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t k = 0; k < 3; ++k) {
      h ^= static_cast<unsigned char>(padded[i + k]);
      h *= 0x100000001b3ULL;
    }
    v[static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_))] += 1.0;
  }
  return v;
}

EmbeddingPair HashingEmbedder::encode(std::string_view source, std::string_view aux) {
  return {embed(source), embed(aux)};
}

EmbeddingPair HttpEmbedder::encode(std::string_view source, std::string_view aux) {
  const nlohmann::json req{{"texts", {std::string(source), std::string(aux)}}};
  const auto res = detail::http_post_json(config_.url, req.dump(), {}, config_.timeout);
  if (res.status == 429) throw Error(ErrorKind::rate_limited, "embedder rate-limited");
  if (res.status >= 500) throw Error(ErrorKind::transport, "embedder returned HTTP " + std::to_string(res.status));
  if (res.status != 200) {
    throw Error(ErrorKind::malformed_response, "embedder returned HTTP " + std::to_string(res.status));
  }
  try {
    const auto j = nlohmann::json::parse(res.body);
    const auto& e = j.at("embeddings");
    auto to_vec = [](const nlohmann::json& arr) {
      const auto values = arr.get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                               static_cast<Eigen::Index>(values.size())));
    };
    if (e.size() != 2) throw Error(ErrorKind::malformed_response, "expected two embeddings");
    return {to_vec(e[0]), to_vec(e[1])};
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(ErrorKind::malformed_response, std::string("embedder response: ") + ex.what());
  }
}

}  // namespace pomp

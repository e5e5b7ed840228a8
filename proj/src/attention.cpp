#include "spt/attention.hpp"

#include "spt/error.hpp"
#include "spt/loss.hpp"

namespace spt {
namespace {

nlohmann::json matrix_json(const Matrix<float>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<float> row(m.row(i).data(), m.row(i).data() + m.cols());
    rows.push_back(row);
  }
  return rows;
}

Matrix<float> cosine_matrix(const Matrix<float>& h) {
  Matrix<double> hd = h.cast<double>();
  Vector<double> norms = hd.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i)
    if (norms(i) == 0.0) norms(i) = 1.0;
  Matrix<double> unit = hd.array().colwise() / norms.array();
  Matrix<double> cos = unit * unit.transpose();
  return cos.cast<float>();
}

}  // namespace

nlohmann::json AttentionExport::to_json() const {
  nlohmann::json j;
  j["tokens"] = tokens;
  j["attention"] = nlohmann::json::array();
  for (const auto& layer : attention) {
    nlohmann::json heads = nlohmann::json::array();
    for (const auto& m : layer) heads.push_back(matrix_json(m));
    j["attention"].push_back(heads);
  }
  j["cosine"] = nlohmann::json::array();
  for (const auto& m : cosine) j["cosine"].push_back(matrix_json(m));
  return j;
}

AttentionExport export_attention(const ModelBundle& bundle, const PromptedSentence& masked,
                                 const PromptVocab& vocab) {
  if (bundle.config.arch != Arch::encoder) throw ContractError("export_attention requires an encoder-mode model");
  AttentionExport out;
  out.tokens = to_lexemes(masked);
  TokenSequence x = tokenize(masked, vocab);
  ForwardCache<float> cache;
  forward<float>(bundle.config, bundle.params, x.ids, &cache);
  const int L = bundle.config.layers;
  for (int l = 0; l < L; ++l) {
    out.attention.push_back(cache.layers[l].probs);
    const Matrix<float>& state = l + 1 < L ? cache.layers[l + 1].input : cache.final_input;
    out.cosine.push_back(cosine_matrix(state));
  }
  return out;
}

}  // namespace spt

#pragma once

// JSON wire protocol shared by the external-scorer client and the service's
// own /score endpoint:
//
//   request  {"model_id", "source", "summary", "want_attention"}
//   response {"score", "truncated", "tokens": [{"start","end","segment","global"}],
//             "attention"?: see attention_wire.hpp}

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scorelens/attention/attention_tensor.hpp"
#include "scorelens/scoring/model_input.hpp"

namespace scorelens::scoring {

struct ScoreRequest {
  std::string model_id;
  std::string source;
  std::string summary;
  bool want_attention = false;
};

/// A model's continuous score for one source/summary pair, in z-normalized
/// standard-deviation units.
struct ScoreResult {
  std::string model_id;
  double score = 0.0;
  bool truncated = false;
  std::vector<TokenInfo> tokens;
  std::shared_ptr<const attention::AttentionTensor> attention;  // null unless requested
};

nlohmann::json to_json(const ScoreRequest& request);
ScoreRequest score_request_from_json(const nlohmann::json& j);  // SchemaError

nlohmann::json score_response_to_json(const ScoreResult& result);

/// Validates a response body; surfaces are filled from the request texts.
/// Throws SchemaError naming the offending field.
ScoreResult score_response_from_json(const nlohmann::json& j, const ScoreRequest& request);

nlohmann::json token_to_json(const TokenInfo& token);

}  // namespace scorelens::scoring

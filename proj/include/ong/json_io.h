#pragma once

#include <string>

#include "json.hpp"
#include "ong/metrics.h"
#include "ong/model.h"
#include "ong/objective.h"

namespace ong {

using Json = nlohmann::ordered_json;

inline void to_json(Json& j, const AblationMask& m) {
  j = Json{{"use_kl", m.use_kl},
           {"use_reg", m.use_reg},
           {"use_gcn", m.use_gcn},
           {"use_onlstm", m.use_onlstm},
           {"use_plain_lstm", m.use_plain_lstm},
           {"use_ad", m.use_ad},
           {"use_at", m.use_at},
           {"reg_pool", m.reg_pool == AblationMask::RegPool::kGraph
                            ? "graph"
                            : "maxpool"}};
}

inline void from_json(const Json& j, AblationMask& m) {
  m.use_kl = j.at("use_kl").get<bool>();
  m.use_reg = j.at("use_reg").get<bool>();
  m.use_gcn = j.at("use_gcn").get<bool>();
  m.use_onlstm = j.at("use_onlstm").get<bool>();
  m.use_plain_lstm = j.at("use_plain_lstm").get<bool>();
  m.use_ad = j.at("use_ad").get<bool>();
  m.use_at = j.at("use_at").get<bool>();
  m.reg_pool = j.at("reg_pool").get<std::string>() == "maxpool"
                   ? AblationMask::RegPool::kMaxpool
                   : AblationMask::RegPool::kGraph;
}

inline void to_json(Json& j, const ModelConfig& c) {
  j = Json{{"tok_dim", c.tok_dim},
           {"pos_dim", c.pos_dim},
           {"hidden", c.hidden},
           {"gcn_dim", c.gcn_dim},
           {"gcn_layers", c.gcn_layers},
           {"head_hidden", c.head_hidden},
           {"rmax", c.rmax},
           {"edge_hidden", c.edge_hidden},
           {"sidecar_dim", c.sidecar_dim},
           {"gamma", c.gamma},
           {"alpha", c.alpha},
           {"beta", c.beta},
           {"direct_a", c.direct_a},
           {"sep_reg_gcn", c.sep_reg_gcn},
           {"mask", c.mask}};
}

inline void from_json(const Json& j, ModelConfig& c) {
  c.tok_dim = j.at("tok_dim").get<int>();
  c.pos_dim = j.at("pos_dim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.gcn_dim = j.at("gcn_dim").get<int>();
  c.gcn_layers = j.at("gcn_layers").get<int>();
  c.head_hidden = j.at("head_hidden").get<int>();
  c.rmax = j.at("rmax").get<int>();
  c.edge_hidden = j.at("edge_hidden").get<int>();
  c.sidecar_dim = j.at("sidecar_dim").get<int>();
  c.gamma = j.at("gamma").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.direct_a = j.at("direct_a").get<bool>();
  c.sep_reg_gcn = j.at("sep_reg_gcn").get<bool>();
  c.mask = j.at("mask").get<AblationMask>();
}

inline void to_json(Json& j, const Metrics& m) {
  j = Json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
           {"tp", m.tp},               {"fp", m.fp},         {"fn", m.fn}};
}

inline void to_json(Json& j, const LossBreakdown& b) {
  j = Json{{"pred", b.pred}, {"kl", b.kl}, {"reg", b.reg}, {"total", b.total}};
}

}  // namespace ong

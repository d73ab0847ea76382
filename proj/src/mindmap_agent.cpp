#include "agentic/mindmap_agent.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "agentic/text_util.hpp"

namespace agentic {

namespace {

std::string node_key(std::string_view label) { return text::to_lower_ascii(text::collapse_whitespace(label)); }

NodeKind object_kind(std::string_view label) {
  const bool has_digit = std::any_of(label.begin(), label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  std::size_t words = 0;
  bool in_word = false;
  for (char c : label) {
    const bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return has_digit || words > 4 ? NodeKind::Fact : NodeKind::Entity;
}

std::string render_edge(const KnowledgeGraph& graph, const GraphEdge& e) {
  return graph.nodes()[e.src].label + " | " + e.relation + " | " + graph.nodes()[e.dst].label;
}

}  // namespace

std::string_view node_kind_name(NodeKind kind) { return kind == NodeKind::Entity ? "entity" : "fact"; }

int KnowledgeGraph::upsert_node(const std::string& label, NodeKind kind, int provenance, bool& created) {
  auto key = node_key(label);
  if (auto it = by_key_.find(key); it != by_key_.end()) {
    created = false;
    return it->second;
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(GraphNode{id, text::collapse_whitespace(label), kind, provenance});
  by_key_.emplace(std::move(key), id);
  created = true;
  return id;
}

KnowledgeGraph::AddResult KnowledgeGraph::add(const Triple& triple, int provenance) {
  AddResult result;
  bool created = false;
  const int src = upsert_node(triple.subject, NodeKind::Entity, provenance, created);
  result.new_nodes += created;
  const int dst = upsert_node(triple.object, object_kind(triple.object), provenance, created);
  result.new_nodes += created;
  const auto relation = text::collapse_whitespace(triple.relation);
  const bool exists = std::any_of(edges_.begin(), edges_.end(), [&](const GraphEdge& e) {
    return e.src == src && e.dst == dst && text::to_lower_ascii(e.relation) == text::to_lower_ascii(relation);
  });
  if (!exists) {
    edges_.push_back(GraphEdge{src, dst, relation, provenance});
    result.new_edges = 1;
  }
  return result;
}

const GraphNode* KnowledgeGraph::find(std::string_view label) const {
  auto it = by_key_.find(node_key(label));
  return it == by_key_.end() ? nullptr : &nodes_[it->second];
}

std::vector<std::string> KnowledgeGraph::integrity_violations() const {
  std::vector<std::string> out;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<int>(i)) out.push_back("node id " + std::to_string(nodes_[i].id) + " out of order");
    if (!keys.insert(node_key(nodes_[i].label)).second) out.push_back("duplicate node label " + nodes_[i].label);
  }
  const auto n = static_cast<int>(nodes_.size());
  for (const auto& e : edges_) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      out.push_back("dangling edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
    }
  }
  return out;
}

Json KnowledgeGraph::to_json() const {
  Json doc;
  doc["nodes"] = Json::array();
  for (const auto& node : nodes_) {
    doc["nodes"].push_back({{"id", node.id},
                            {"label", node.label},
                            {"kind", node_kind_name(node.kind)},
                            {"provenance", node.provenance}});
  }
  doc["edges"] = Json::array();
  for (const auto& e : edges_) {
    doc["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"relation", e.relation}, {"provenance", e.provenance}});
  }
  return doc;
}

ParsedTriples parse_triples(std::string_view reply) {
  ParsedTriples out;
  for (auto line : text::split_lines(reply)) {
    if (text::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.emplace_back(text::trim(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const bool ok = fields.size() == 3 && std::none_of(fields.begin(), fields.end(), [](const auto& f) { return f.empty(); });
    if (!ok) {
      ++out.skipped_count;
      continue;
    }
    out.triples.push_back(Triple{fields[0], fields[1], fields[2]});
  }
  return out;
}

IngestResult ingest(const std::string& passage, KnowledgeGraph& graph, RoleChannel& channel, const PromptBook& prompts,
                    bool thinking, int provenance) {
  const auto user = prompts.render("mindmap_extract", {{"PASSAGE", passage}});
  const auto reply = channel.ask(AgentRole::MindMap, prompts.system_prompt(AgentRole::MindMap, true), user, thinking);
  auto parsed = parse_triples(reply.content);
  IngestResult result;
  result.skipped_count = parsed.skipped_count;
  for (const auto& t : parsed.triples) {
    const auto added = graph.add(t, provenance);
    result.new_nodes += added.new_nodes;
    result.new_edges += added.new_edges;
  }
  result.triples = std::move(parsed.triples);
  return result;
}

std::string query_graph(const std::string& question, const KnowledgeGraph& graph,
                        const std::unordered_set<std::string>& stop_words, std::size_t top_m) {
  if (graph.empty()) return std::string(kMindMapEmpty);
  const auto q_tokens = text::tokenize(question, stop_words);
  const std::set<std::string> wanted(q_tokens.begin(), q_tokens.end());

  const auto& nodes = graph.nodes();
  std::vector<std::set<std::string>> bags(nodes.size());
  std::vector<std::vector<std::size_t>> incident(nodes.size());
  auto add_tokens = [&](std::size_t node, std::string_view s) {
    for (auto& t : text::tokenize(s, stop_words)) bags[node].insert(std::move(t));
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) add_tokens(i, nodes[i].label);
  for (std::size_t k = 0; k < graph.edges().size(); ++k) {
    const auto& e = graph.edges()[k];
    for (auto [self, other] : {std::pair{e.src, e.dst}, std::pair{e.dst, e.src}}) {
      add_tokens(self, e.relation);
      add_tokens(self, nodes[other].label);
      incident[self].push_back(k);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (score, node)
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t score = 0;
    for (const auto& t : bags[i]) score += wanted.count(t);
    if (score > 0) scored.emplace_back(score, i);
  }
  if (scored.empty()) return std::string(kMindMapNoMatch);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > top_m) scored.resize(top_m);

  std::string out;
  for (std::size_t rank = 0; rank < scored.size(); ++rank) {
    const auto& node = nodes[scored[rank].second];
    if (rank > 0) out += "\n";
    out += std::to_string(rank + 1) + ". " + node.label + " (" + std::string(node_kind_name(node.kind)) + ")";
    for (auto k : incident[node.id]) out += "\n   " + render_edge(graph, graph.edges()[k]);
  }
  return out;
}

std::string run_mindmap(const std::string& argument_key, const std::string& arguments, KnowledgeGraph& graph,
                        RoleChannel& channel, const PromptBook& prompts, const std::unordered_set<std::string>& stop_words,
                        std::size_t top_m, bool thinking, int provenance) {
  if (argument_key == "query") return query_graph(arguments, graph, stop_words, top_m);
  const auto r = ingest(arguments, graph, channel, prompts, thinking, provenance);
  std::string out = "MINDMAP_STORED: " + std::to_string(r.triples.size()) + " triples, " +
                    std::to_string(r.new_nodes) + " new nodes, " + std::to_string(r.new_edges) + " new edges, " +
                    std::to_string(r.skipped_count) + " skipped lines";
  for (const auto& t : r.triples) out += "\n" + t.subject + " | " + t.relation + " | " + t.object;
  return out;
}

}  // namespace agentic

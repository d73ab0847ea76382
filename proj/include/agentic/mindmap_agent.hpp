#pragma once

#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "agentic/model_gateway.hpp"
#include "agentic/prompts.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

enum class NodeKind { Entity, Fact };

std::string_view node_kind_name(NodeKind kind);

struct GraphNode {
  int id = 0;
  std::string label;
  NodeKind kind = NodeKind::Entity;
  int provenance = 0;  // tool-call index that first introduced the node
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  std::string relation;
  int provenance = 0;
};

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Triple&) const = default;
};

/// Per-task store of findings. Nodes are deduplicated by case-folded label;
/// ids follow insertion order.
class KnowledgeGraph {
 public:
  struct AddResult {
    std::size_t new_nodes = 0;
    std::size_t new_edges = 0;
  };

  AddResult add(const Triple& triple, int provenance);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool empty() const { return nodes_.empty(); }
  const GraphNode* find(std::string_view label) const;

  /// Broken referential-integrity facts; empty when the graph is sound.
  std::vector<std::string> integrity_violations() const;

  /// {"nodes": [{id, label, kind, provenance}], "edges": [{src, dst, relation, provenance}]}
  Json to_json() const;

 private:
  int upsert_node(const std::string& label, NodeKind kind, int provenance, bool& created);

  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::map<std::string, int, std::less<>> by_key_;
};

struct ParsedTriples {
  std::vector<Triple> triples;
  std::size_t skipped_count = 0;  // non-blank lines that were not three tab-separated fields
};

ParsedTriples parse_triples(std::string_view reply);

struct IngestResult {
  std::vector<Triple> triples;
  std::size_t skipped_count = 0;
  std::size_t new_nodes = 0;
  std::size_t new_edges = 0;
};

/// One model call extracting triples from `passage`, merged into `graph`.
IngestResult ingest(const std::string& passage, KnowledgeGraph& graph, RoleChannel& channel, const PromptBook& prompts,
                    bool thinking, int provenance);

inline constexpr std::string_view kMindMapEmpty = "MINDMAP_EMPTY";
inline constexpr std::string_view kMindMapNoMatch = "MINDMAP_NO_MATCH";

/// Ranks nodes by how many question tokens (stop words removed) appear in the
/// node label, its relations, or its neighbours' labels. Ties keep insertion
/// order. No model call.
std::string query_graph(const std::string& question, const KnowledgeGraph& graph,
                        const std::unordered_set<std::string>& stop_words, std::size_t top_m);

/// Dispatches one planner invocation: argument key "task" stores, "query"
/// retrieves.
std::string run_mindmap(const std::string& argument_key, const std::string& arguments, KnowledgeGraph& graph,
                        RoleChannel& channel, const PromptBook& prompts, const std::unordered_set<std::string>& stop_words,
                        std::size_t top_m, bool thinking, int provenance);

}  // namespace agentic

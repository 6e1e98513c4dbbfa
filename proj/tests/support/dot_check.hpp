#pragma once

// Recursive-descent checker for the DOT language (graph, statements,
// attribute lists, edge chains, subgraphs, ports, comments, quoted and HTML ids).

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dotcheck {

struct Statement {
    std::vector<std::string> ids;  // one for a node, two or more for an edge chain
    std::map<std::string, std::string> attrs;
};

struct Result {
    bool ok = false;
    std::string error;
    bool directed = false;
    std::string graph_id;
    std::vector<Statement> nodes;
    std::vector<Statement> edges;
};

Result check(std::string_view text);

}  // namespace dotcheck

#include "restarch/search.hpp"

#include <expat.h>

#include <algorithm>
#include <functional>
#include <memory>

#include "restarch/error.hpp"
#include "restarch/vocabulary.hpp"

namespace restarch {

namespace v = vocab;

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(sep, start);
        if (end == std::string_view::npos) end = s.size();
        auto item = s.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        start = end + 1;
    }
    return out;
}

void QuerySpec::validate() const {
    if (root_element.empty()) throw CriteriaError("search needs a root element");
    if (columns.empty()) throw CriteriaError("search needs at least one column");
    std::set<std::string> seen;
    for (const auto& c : columns) {
        auto slash = c.find('/');
        if (slash == std::string::npos || slash == 0 || slash + 1 == c.size() ||
            c.find('/', slash + 1) != std::string::npos) {
            throw CriteriaError("column '" + c + "' must look like 'datatype/FIELD'");
        }
        if (!seen.insert(c).second) throw CriteriaError("duplicate column '" + c + "'");
    }
    criteria.validate();
}

namespace {

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void leaf(std::string& out, int depth, std::string_view name, std::string_view text) {
    indent(out, depth);
    out += '<';
    out += name;
    out += '>';
    out += escape(text);
    out += "</";
    out += name;
    out += ">\n";
}

void emit_set(std::string& out, int depth, std::string_view tag, const CriteriaSet& set) {
    indent(out, depth);
    out += '<';
    out += tag;
    out += ' ';
    out += v::kMethod;
    out += "=\"";
    out += to_string(set.method);
    out += "\">\n";
    for (const auto& item : set.items) {
        if (const auto* c = std::get_if<Constraint>(&item.node)) {
            indent(out, depth + 1);
            out += '<';
            out += v::kCriteria;
            out += ">\n";
            leaf(out, depth + 2, v::kSchemaField, c->schema_field);
            leaf(out, depth + 2, v::kComparisonType, to_string(c->op));
            leaf(out, depth + 2, v::kValue, c->value);
            indent(out, depth + 1);
            out += "</";
            out += v::kCriteria;
            out += ">\n";
        } else {
            emit_set(out, depth + 1, v::kChildSet, std::get<CriteriaSet>(item.node));
        }
    }
    indent(out, depth);
    out += "</";
    out += tag;
    out += ">\n";
}

}  // namespace

std::string to_xml(const QuerySpec& spec) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += '<';
    out += v::kSearch;
    out += ">\n";
    leaf(out, 1, v::kRootElementName, spec.root_element);
    for (std::size_t i = 0; i < spec.columns.size(); ++i) {
        const auto& col = spec.columns[i];
        auto slash = col.find('/');
        indent(out, 1);
        out += '<';
        out += v::kSearchField;
        out += ">\n";
        leaf(out, 2, v::kElementName, col.substr(0, slash));
        leaf(out, 2, v::kFieldId, slash == std::string::npos ? std::string() : col.substr(slash + 1));
        leaf(out, 2, v::kSequence, std::to_string(i));
        indent(out, 1);
        out += "</";
        out += v::kSearchField;
        out += ">\n";
    }
    emit_set(out, 1, v::kCriteriaSet, spec.criteria);
    out += "</";
    out += v::kSearch;
    out += ">\n";
    return out;
}

namespace {

struct XmlNode {
    std::string name;
    std::map<std::string, std::string> attrs;
    std::vector<std::unique_ptr<XmlNode>> children;
    std::string text;

    const XmlNode* child(std::string_view n) const {
        for (const auto& c : children) {
            if (c->name == n) return c.get();
        }
        return nullptr;
    }

    const std::string& required_text(std::string_view n) const {
        const auto* c = child(n);
        if (!c) throw ParseError("<" + name + "> lacks <" + std::string(n) + ">");
        return c->text;
    }
};

struct DomBuilder {
    std::unique_ptr<XmlNode> root;
    std::vector<XmlNode*> stack;

    static void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
        auto* self = static_cast<DomBuilder*>(data);
        auto node = std::make_unique<XmlNode>();
        node->name = name;
        for (int i = 0; attrs[i]; i += 2) node->attrs[attrs[i]] = attrs[i + 1];
        XmlNode* raw = node.get();
        if (self->stack.empty()) {
            self->root = std::move(node);
        } else {
            self->stack.back()->children.push_back(std::move(node));
        }
        self->stack.push_back(raw);
    }

    static void on_end(void* data, const XML_Char*) { static_cast<DomBuilder*>(data)->stack.pop_back(); }

    static void on_text(void* data, const XML_Char* s, int len) {
        auto* self = static_cast<DomBuilder*>(data);
        if (!self->stack.empty()) self->stack.back()->text.append(s, static_cast<std::size_t>(len));
    }
};

std::unique_ptr<XmlNode> parse_dom(std::string_view xml) {
    DomBuilder builder;
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw ParseError("cannot allocate XML parser");
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), &DomBuilder::on_start, &DomBuilder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &DomBuilder::on_text);
    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
        throw ParseError(std::string("malformed XML at line ") +
                         std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                         XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!builder.root) throw ParseError("empty XML document");
    return std::move(builder.root);
}

CriteriaSet read_set(const XmlNode& node) {
    auto it = node.attrs.find(std::string(v::kMethod));
    if (it == node.attrs.end()) throw ParseError("<" + node.name + "> lacks a method attribute");
    auto method = parse_combinator(it->second);
    if (!method) throw ParseError("unknown method '" + it->second + "'");
    CriteriaSet set;
    set.method = *method;
    for (const auto& c : node.children) {
        if (c->name == v::kCriteria) {
            auto op_text = c->required_text(v::kComparisonType);
            auto op = parse_compare_op(op_text);
            if (!op) throw ParseError("unknown comparison '" + op_text + "'");
            set.items.emplace_back(Constraint{c->required_text(v::kSchemaField), *op, c->required_text(v::kValue)});
        } else if (c->name == v::kChildSet) {
            set.items.emplace_back(read_set(*c));
        } else {
            throw ParseError("unexpected <" + c->name + "> in <" + node.name + ">");
        }
    }
    return set;
}

}  // namespace

QuerySpec parse_query_xml(std::string_view xml) {
    auto root = parse_dom(xml);
    if (root->name != v::kSearch) throw ParseError("root element is <" + root->name + ">, not <search>");
    QuerySpec spec;
    spec.root_element = root->required_text(v::kRootElementName);
    std::vector<std::pair<long, std::string>> fields;
    const XmlNode* criteria = nullptr;
    for (const auto& c : root->children) {
        if (c->name == v::kSearchField) {
            long seq = static_cast<long>(fields.size());
            if (const auto* s = c->child(v::kSequence)) {
                try {
                    seq = std::stol(s->text);
                } catch (const std::exception&) {
                    throw ParseError("bad sequence '" + s->text + "'");
                }
            }
            fields.emplace_back(seq, c->required_text(v::kElementName) + "/" + c->required_text(v::kFieldId));
        } else if (c->name == v::kCriteriaSet) {
            if (criteria) throw ParseError("more than one <criteria_set>");
            criteria = c.get();
        }
    }
    std::stable_sort(fields.begin(), fields.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& f : fields) spec.columns.push_back(std::move(f.second));
    if (!criteria) throw ParseError("search document lacks <criteria_set>");
    spec.criteria = read_set(*criteria);
    return spec;
}

QuerySpec SearchTemplate::bind(const std::map<std::string, std::string>& bindings) const {
    std::vector<std::string> missing;
    for (const auto& k : keys) {
        if (!bindings.count(k)) missing.push_back(k);
    }
    if (!missing.empty()) throw MissingBinding(std::move(missing));

    QuerySpec out = spec;
    std::function<void(CriteriaSet&)> substitute = [&](CriteriaSet& set) {
        for (auto& item : set.items) {
            if (auto* c = std::get_if<Constraint>(&item.node)) {
                c->value = bindings.at(c->value);
            } else {
                substitute(std::get<CriteriaSet>(item.node));
            }
        }
    };
    substitute(out.criteria);
    return out;
}

SearchClient::SearchClient(std::shared_ptr<const Session> session) : session_(std::move(session)) {}

ResultTable SearchClient::run(const QuerySpec& spec, Format format) const {
    spec.validate();
    auto uri = session_->endpoint(v::kSearchEndpoint) + "?format=" + std::string(to_string(format));
    auto resp = session_->query(uri, to_xml(spec), "application/xml").response;
    if (!resp.ok()) {
        std::string msg = "search failed: HTTP " + std::to_string(resp.status);
        if (!resp.body.empty() && resp.body.size() < 300) msg += " (" + resp.body + ")";
        throw SearchError(resp.status, msg);
    }
    auto raw = parse_table(resp.body, format);

    // Servers may order columns freely; hand them back in request order.
    std::vector<std::size_t> order;
    for (const auto& c : spec.columns) {
        auto idx = raw.index_of(c);
        if (!idx) throw ParseError("search result lacks column '" + c + "'");
        order.push_back(*idx);
    }
    ResultTable table(spec.columns);
    for (const auto& row : raw.rows()) {
        ResultTable::Row out;
        out.reserve(order.size());
        for (auto i : order) out.push_back(row[i]);
        table.add_row(std::move(out));
    }
    return table;
}

void SearchClient::put_document(std::string_view collection, const std::string& name, const QuerySpec& spec,
                                const std::vector<std::string>& shared_with) const {
    if (name.empty()) throw ValidationError("search name is empty");
    spec.validate();
    Request req{Method::PUT, session_->endpoint(collection) + "/" + percent_encode(name), to_xml(spec), {}};
    req.headers["Content-Type"] = "application/xml";
    if (!shared_with.empty()) {
        std::string joined;
        for (const auto& u : shared_with) joined += (joined.empty() ? "" : ",") + u;
        req.headers[std::string(v::kSharedWithHeader)] = joined;
    }
    raise_for_status(session_->send(std::move(req)), "saving search '" + name + "'");
}

std::pair<QuerySpec, std::vector<std::string>> SearchClient::get_document(std::string_view collection,
                                                                          const std::string& name) const {
    // Stored documents change under the same URI, so always revalidate.
    auto resp = session_->get(session_->endpoint(collection) + "/" + percent_encode(name), std::chrono::seconds(0))
                    .response;
    raise_for_status(resp, "fetching search '" + name + "'");
    std::vector<std::string> shared;
    if (auto h = resp.header(v::kSharedWithHeader)) shared = split_list(*h);
    return {parse_query_xml(resp.body), std::move(shared)};
}

void SearchClient::save(const std::string& name, const QuerySpec& spec,
                        const std::vector<std::string>& shared_with) const {
    put_document(v::kSavedSearches, name, spec, shared_with);
}

SavedSearch SearchClient::get(const std::string& name) const {
    auto [spec, shared] = get_document(v::kSavedSearches, name);
    return SavedSearch{name, std::move(spec), std::move(shared)};
}

void SearchClient::save_template(const std::string& name, const QuerySpec& spec,
                                 const std::vector<std::string>& shared_with) const {
    put_document(v::kSearchTemplates, name, spec, shared_with);
}

SearchTemplate SearchClient::get_template(const std::string& name) const {
    auto [spec, shared] = get_document(v::kSearchTemplates, name);
    auto keys = placeholder_keys(spec.criteria);
    return SearchTemplate{name, std::move(spec), std::move(keys), std::move(shared)};
}

ResultTable SearchClient::use_template(const std::string& name, const std::map<std::string, std::string>& bindings,
                                       Format format) const {
    return run(get_template(name).bind(bindings), format);
}

}  // namespace restarch

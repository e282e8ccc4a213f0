#include "restarch/cli.hpp"

#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "restarch/download.hpp"
#include "restarch/error.hpp"
#include "restarch/interface.hpp"

namespace restarch {

namespace {

struct Globals {
    std::string url;
    std::string user;
    std::string password;
    std::string cache_dir;
    bool offline = false;
    bool json = false;
    double window = 1.0;
    double timeout = 30.0;
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::string env_or(const CliEnv& env, const std::string& key, const std::string& fallback = {}) {
    auto it = env.vars.find(key);
    return it == env.vars.end() || it->second.empty() ? fallback : it->second;
}

std::string resolve_cache_dir(const Globals& g, const CliEnv& env) {
    if (!g.cache_dir.empty()) return g.cache_dir;
    if (auto dir = env_or(env, "RESTARCH_CACHE_DIR"); !dir.empty()) return dir;
    if (auto xdg = env_or(env, "XDG_CACHE_HOME"); !xdg.empty()) return xdg + "/restarch";
    if (auto home = env_or(env, "HOME"); !home.empty()) return home + "/.cache/restarch";
    return {};
}

Interface open_interface(const Globals& g, const CliEnv& env) {
    ConnectOptions opts;
    opts.url = g.url.empty() ? env_or(env, "RESTARCH_URL") : g.url;
    if (opts.url.empty()) throw UsageError("no archive URL: pass --url or set RESTARCH_URL");
    opts.credentials.user = g.user.empty() ? env_or(env, "RESTARCH_USER") : g.user;
    opts.credentials.secret = g.password.empty() ? env_or(env, "RESTARCH_PASS") : g.password;
    if (opts.credentials.empty() && !g.offline && env.prompt) {
        if (auto c = env.prompt()) opts.credentials = *c;
    }
    auto dir = resolve_cache_dir(g, env);
    if (!dir.empty()) opts.cache_dir = dir;
    opts.policy.offline = g.offline;
    opts.policy.expiration_window = std::chrono::duration<double>(g.window);
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(g.timeout * 1000));
    if (g.offline && !opts.cache_dir) throw UsageError("--offline needs a cache directory");
    return Interface::connect(opts);
}

std::vector<std::string> split_csv_arg(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void print_lines(std::ostream& out, const std::vector<std::string>& lines, bool json) {
    if (json) {
        out << nlohmann::json(lines).dump() << "\n";
        return;
    }
    for (const auto& l : lines) out << l << "\n";
}

void print_table(std::ostream& out, const ResultTable& table, bool json) {
    out << (json ? table.to_json() + "\n" : table.to_csv());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnv& env) {
    CLI::App app{"Client for XNAT-style REST archives", args.empty() ? "restarch" : args[0]};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Globals g;
    app.add_option("--url", g.url, "Archive base URL (default: $RESTARCH_URL)");
    app.add_option("--user", g.user, "Login (default: $RESTARCH_USER)");
    app.add_option("--password", g.password, "Password (default: $RESTARCH_PASS)");
    app.add_option("--cache-dir", g.cache_dir, "Cache directory (default: $RESTARCH_CACHE_DIR)");
    app.add_flag("--offline", g.offline, "Serve everything from the cache");
    app.add_flag("--json", g.json, "JSON output");
    app.add_option("--window", g.window, "Cache expiration window in seconds")->check(CLI::NonNegativeNumber);
    app.add_option("--timeout", g.timeout, "Network timeout in seconds")->check(CLI::PositiveNumber);

    // select
    std::string sel_path, sel_where, sel_format = "lines", sel_out;
    unsigned sel_workers = std::max(1u, std::thread::hardware_concurrency());
    auto* select = app.add_subcommand("select", "List or download what a selector names");
    select->add_option("path", sel_path, "Selector, e.g. /projects/*/subjects or //experiments//files")->required();
    select->add_option("--where", sel_where, "Criteria as a JSON nested list");
    select->add_option("--format", sel_format, "lines or csv")->check(CLI::IsMember({"lines", "csv"}));
    select->add_option("--out", sel_out, "Download file elements below this directory");
    select->add_option("--workers", sel_workers, "Parallel downloads")->check(CLI::PositiveNumber);

    // search
    auto* search = app.add_subcommand("search", "Run and store searches");
    search->require_subcommand(1);
    std::string s_root, s_columns, s_where, s_name, s_share, s_format = "csv";
    std::vector<std::string> s_bind;
    auto add_query_opts = [&](CLI::App* cmd) {
        cmd->add_option("root", s_root, "Row datatype, e.g. xnat:mrSessionData")->required();
        cmd->add_option("--columns", s_columns, "Comma-separated schema fields")->required();
        cmd->add_option("--where", s_where, "Criteria as a JSON nested list")->required();
    };
    auto* s_run = search->add_subcommand("run", "Run a search and print the table");
    add_query_opts(s_run);
    s_run->add_option("--format", s_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* s_save = search->add_subcommand("save", "Store a search on the server");
    s_save->add_option("name", s_name)->required();
    add_query_opts(s_save);
    s_save->add_option("--share", s_share, "Comma-separated users to share with");
    auto* s_get = search->add_subcommand("get", "Print a stored search document");
    s_get->add_option("name", s_name)->required();
    auto* s_template = search->add_subcommand("template", "Searches with placeholder values");
    s_template->require_subcommand(1);
    auto* t_save = s_template->add_subcommand("save", "Store a template; every criteria value is a key");
    t_save->add_option("name", s_name)->required();
    add_query_opts(t_save);
    t_save->add_option("--share", s_share, "Comma-separated users to share with");
    auto* t_use = s_template->add_subcommand("use", "Run a template with key=value bindings");
    t_use->add_option("name", s_name)->required();
    t_use->add_option("--bind", s_bind, "key=value, repeatable");
    t_use->add_option("--format", s_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Schema introspection");
    inspect->require_subcommand(1);
    std::string i_arg;
    auto* i_types = inspect->add_subcommand("datatypes", "List datatypes");
    auto* i_fields = inspect->add_subcommand("fields", "List the fields of a datatype");
    i_fields->add_option("datatype", i_arg)->required();
    auto* i_values = inspect->add_subcommand("values", "Distinct values of a field");
    i_values->add_option("field", i_arg)->required();

    // manage
    auto* manage = app.add_subcommand("manage", "Project administration");
    manage->require_subcommand(1);
    std::string m_project, m_level, m_user, m_role;
    auto* m_access = manage->add_subcommand("access", "Show or set a project's accessibility");
    m_access->add_option("project", m_project)->required();
    m_access->add_option("level", m_level, "public, protected or private");
    auto* m_users = manage->add_subcommand("user", "Project membership");
    m_users->require_subcommand(1);
    auto* u_add = m_users->add_subcommand("add", "Give a user a role");
    u_add->add_option("project", m_project)->required();
    u_add->add_option("user", m_user)->required();
    u_add->add_option("role", m_role, "owner, member or collaborator")->required();
    auto* u_remove = m_users->add_subcommand("remove", "Remove a user");
    u_remove->add_option("project", m_project)->required();
    u_remove->add_option("user", m_user)->required();
    auto* u_list = m_users->add_subcommand("list", "List members as login,role");
    u_list->add_option("project", m_project)->required();

    // cache
    auto* cache = app.add_subcommand("cache", "Local cache maintenance");
    cache->require_subcommand(1);
    std::string c_prefix;
    auto* c_clear = cache->add_subcommand("clear", "Remove cached entries");
    c_clear->add_option("--prefix", c_prefix, "Only keys starting with this, e.g. /REST/projects/P1");
    auto* c_status = cache->add_subcommand("status", "Count cached entries");

    std::vector<const char*> argv;
    std::string program = args.empty() ? "restarch" : args[0];
    argv.push_back(program.c_str());
    for (std::size_t i = 1; i < args.size(); ++i) argv.push_back(args[i].c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    std::ostringstream buffer;
    try {
        if (select->parsed()) {
            auto iface = open_interface(g, env);
            auto selection = iface.select(sel_path);
            if (auto* element = std::get_if<ElementHandle>(&selection)) {
                if (!sel_where.empty()) throw UsageError("--where needs a collection selector");
                if (!sel_out.empty() && element->level() == "files") {
                    buffer << element->get_file(download_location(sel_out, element->path())).string() << "\n";
                } else {
                    if (!element->exists()) throw NotFound(element->path().str() + " does not exist");
                    buffer << element->id() << "\n";
                }
            } else {
                auto collection = std::get<CollectionHandle>(selection);
                if (!sel_where.empty()) collection = collection.where(sel_where);
                auto stream = collection.iterate();
                if (!sel_out.empty()) {
                    std::vector<std::string> written;
                    for (const auto& p : download_all(stream, sel_out, sel_workers)) written.push_back(p.string());
                    print_lines(buffer, written, g.json);
                } else if (sel_format == "csv" || g.json) {
                    ResultTable table({"ID", "path"});
                    while (auto e = stream.next()) table.add_row({e->id(), e->path().str()});
                    print_table(buffer, table, g.json);
                } else {
                    while (auto e = stream.next()) buffer << e->id() << "\n";
                }
            }
        } else if (search->parsed()) {
            auto iface = open_interface(g, env);
            auto client = iface.search();
            auto spec = [&] {
                return QuerySpec{s_root, split_csv_arg(s_columns), parse_criteria(s_where)};
            };
            auto format = parse_format(s_format);
            if (s_run->parsed()) {
                print_table(buffer, client.run(spec(), format), g.json || format == Format::json);
            } else if (s_save->parsed()) {
                client.save(s_name, spec(), split_csv_arg(s_share));
            } else if (s_get->parsed()) {
                buffer << to_xml(client.get(s_name).spec);
            } else if (t_save->parsed()) {
                client.save_template(s_name, spec(), split_csv_arg(s_share));
            } else if (t_use->parsed()) {
                std::map<std::string, std::string> bindings;
                for (const auto& b : s_bind) {
                    auto eq = b.find('=');
                    if (eq == std::string::npos) throw UsageError("--bind expects key=value, got '" + b + "'");
                    bindings[b.substr(0, eq)] = b.substr(eq + 1);
                }
                print_table(buffer, client.use_template(s_name, bindings, format), g.json || format == Format::json);
            }
        } else if (inspect->parsed()) {
            auto ins = open_interface(g, env).inspect();
            if (i_types->parsed()) print_lines(buffer, ins.datatypes(), g.json);
            if (i_fields->parsed()) print_lines(buffer, ins.fields(i_arg), g.json);
            if (i_values->parsed()) print_lines(buffer, ins.field_values(i_arg), g.json);
        } else if (manage->parsed()) {
            auto project = open_interface(g, env).manage().project(m_project);
            if (m_access->parsed()) {
                if (m_level.empty()) {
                    buffer << project.get_accessibility() << "\n";
                } else {
                    project.set_accessibility(m_level);
                }
            } else if (u_add->parsed()) {
                project.add_user(m_user, m_role);
            } else if (u_remove->parsed()) {
                project.remove_user(m_user);
            } else if (u_list->parsed()) {
                ResultTable table({"login", "role"});
                for (const auto& [login, role] : project.users()) table.add_row({login, role});
                print_table(buffer, table, g.json);
            }
        } else if (cache->parsed()) {
            auto dir = resolve_cache_dir(g, env);
            if (dir.empty()) throw UsageError("no cache directory: pass --cache-dir or set RESTARCH_CACHE_DIR");
            Cache store(dir, std::make_shared<DisconnectedTransport>());
            if (c_clear->parsed()) {
                auto n = c_prefix.empty() ? store.clear() : store.clear(c_prefix);
                if (g.json) {
                    buffer << nlohmann::json{{"removed", n}}.dump() << "\n";
                } else {
                    buffer << "removed: " << n << "\n";
                }
            } else if (c_status->parsed()) {
                auto s = store.status();
                if (g.json) {
                    buffer << nlohmann::json{{"entries", s.entries}, {"bytes", s.bytes}}.dump() << "\n";
                } else {
                    buffer << "entries: " << s.entries << "\nbytes: " << s.bytes << "\n";
                }
            }
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const OfflineMiss& e) {
        err << "error: offline miss: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    out << buffer.str();
    return 0;
}

}  // namespace restarch

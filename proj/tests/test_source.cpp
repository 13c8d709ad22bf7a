#include <doctest.h>

#include <map>

#include "omh/source.hpp"
#include "support.hpp"

using namespace omh;

namespace {

ExtractionStep make_step(const std::string& pattern, int group = 1,
                         ExtractionStep::Kind kind = ExtractionStep::Kind::PatternExtract) {
    ExtractionStep step;
    step.kind = kind;
    step.pattern_text = pattern;
    step.capture_group = group;
    step.pattern = std::regex(pattern);
    return step;
}

class MapFetcher : public DocumentFetcher {
public:
    std::map<std::string, std::string> docs;
    Result fetch(const std::string& ref) override {
        auto it = docs.find(ref);
        if (it == docs.end()) return {false, {}, "not mapped: " + ref};
        return {true, it->second, {}};
    }
};

std::string manifest_json(const std::string& steps) {
    return R"json([{"id":"cat","display_name":"Cat","steps":[)json" + steps + "]}]";
}

}  // namespace

TEST_CASE("extract_entries follows the source patterns") {
    auto opendoar = make_step("<rOaiBaseUrl>(.*?)</rOaiBaseUrl>");
    CHECK(extract_entries("<rOaiBaseUrl>http://x.org/oai</rOaiBaseUrl>"
                          "<rOaiBaseUrl>http://y.org/oai2</rOaiBaseUrl>",
                          opendoar) ==
          std::vector<std::string>{"http://x.org/oai", "http://y.org/oai2"});

    auto oaister = make_step("OAI base:(.*)</p>");
    CHECK(extract_entries("OAI base:http://z.edu/oai</p>", oaister) ==
          std::vector<std::string>{"http://z.edu/oai"});

    CHECK(extract_entries("", opendoar).empty());
    CHECK(extract_entries("no matches here", oaister).empty());
}

TEST_CASE("extract_entries handles attribute-bearing tags via group 2") {
    auto step = make_step("<baseURL(.*?)>(.*?)</baseURL>", 2);
    auto urls = extract_entries(
        "<baseURL id=\"r1\" status=\"ok\">http://a.org/oai</baseURL>\n"
        "<baseURL>http://b.org/oai</baseURL>",
        step);
    CHECK(urls == std::vector<std::string>{"http://a.org/oai", "http://b.org/oai"});
}

TEST_CASE("extract_entries trims captures and drops empty ones") {
    auto step = make_step("<u>(.*?)</u>");
    CHECK(extract_entries("<u>  http://a.org \t</u><u></u><u>   </u><u>http://b.org</u>", step) ==
          std::vector<std::string>{"http://a.org", "http://b.org"});
}

TEST_CASE("greedy oaister pattern stays within one line") {
    auto step = make_step("OAI base:(.*)</p>");
    // greedy across one line, never across lines
    auto urls = extract_entries(
        "OAI base:http://x.org</p> and OAI base:http://y.org</p>\n"
        "OAI base:http://z.org</p>",
        step);
    CHECK(urls == std::vector<std::string>{"http://x.org</p> and OAI base:http://y.org",
                                           "http://z.org"});
}

TEST_CASE("extraction is deterministic") {
    auto step = make_step("<rOaiBaseUrl>(.*?)</rOaiBaseUrl>");
    std::string doc = "<rOaiBaseUrl>a</rOaiBaseUrl><rOaiBaseUrl>b</rOaiBaseUrl>";
    CHECK(extract_entries(doc, step) == extract_entries(doc, step));
}

TEST_CASE("follow_links fetches pages in link order") {
    MapFetcher fetcher;
    fetcher.docs["p1"] = "one";
    fetcher.docs["p2"] = "two";
    fetcher.docs["p3"] = "three";
    auto step = make_step("href=\"(.*?)\"", 1, ExtractionStep::Kind::LinkFollow);
    auto result = follow_links("<a href=\"p1\"/><a href=\"p2\"/><a href=\"p3\"/>", step, fetcher);
    CHECK(result.documents == std::vector<std::string>{"one", "two", "three"});
    CHECK(result.failed == 0);
}

TEST_CASE("follow_links with no links") {
    MapFetcher fetcher;
    auto step = make_step("href=\"(.*?)\"", 1, ExtractionStep::Kind::LinkFollow);
    auto result = follow_links("<p>nothing to follow</p>", step, fetcher);
    CHECK(result.documents.empty());
    CHECK(result.failed == 0);
}

TEST_CASE("follow_links turns a failed fetch into an empty placeholder") {
    MapFetcher fetcher;
    fetcher.docs["p1"] = "one";
    fetcher.docs["p3"] = "three";  // p2 missing: scripted failure on the second link
    auto step = make_step("href=\"(.*?)\"", 1, ExtractionStep::Kind::LinkFollow);
    auto result = follow_links("<a href=\"p1\"/><a href=\"p2\"/><a href=\"p3\"/>", step, fetcher);
    REQUIRE(result.documents.size() == 3);
    CHECK(result.documents[0] == "one");
    CHECK(result.documents[1].empty());
    CHECK(result.documents[2] == "three");
    CHECK(result.failed == 1);
}

TEST_CASE("harvest_catalog splits all items from oai-bearing items") {
    // 5 item blocks, 3 of them carrying an endpoint
    MapFetcher fetcher;
    fetcher.docs["root"] =
        "<rOaiBaseUrl>http://a.org/oai</rOaiBaseUrl>"
        "<rOaiBaseUrl></rOaiBaseUrl>"
        "<rOaiBaseUrl>http://b.org/oai</rOaiBaseUrl>"
        "<rOaiBaseUrl> </rOaiBaseUrl>"
        "<rOaiBaseUrl>http://c.org/oai</rOaiBaseUrl>";
    SourceManifest m;
    m.catalog = {"opendoar", "OpenDOAR"};
    m.steps.push_back(make_step("<rOaiBaseUrl>(.*?)</rOaiBaseUrl>"));
    m.steps[0].fetch_url = "root";

    auto result = harvest_catalog(m, fetcher);
    CHECK(result.all_items == 5);
    REQUIRE(result.entries.size() == 3);
    CHECK(result.entries[0].raw_url == "http://a.org/oai");
    CHECK(result.entries[0].source == "opendoar");
    CHECK(result.entries[2].raw_url == "http://c.org/oai");
}

TEST_CASE("harvest_catalog two-step source counts followed links") {
    MapFetcher fetcher;
    fetcher.docs["index"] =
        "<a class=\"p\" href=\"p1\"/><a class=\"p\" href=\"p2\"/>"
        "<a class=\"p\" href=\"p3\"/><a class=\"p\" href=\"p4\"/>";
    for (int i = 1; i <= 4; ++i)
        fetcher.docs["p" + std::to_string(i)] =
            "<oai>http://r" + std::to_string(i) + ".org/oai</oai>";

    SourceManifest m;
    m.catalog = {"openaire", "OpenAIRE"};
    m.steps.push_back(make_step("href=\"(.*?)\"", 1, ExtractionStep::Kind::LinkFollow));
    m.steps[0].fetch_url = "index";
    m.steps.push_back(make_step("<oai>(.*?)</oai>"));

    auto result = harvest_catalog(m, fetcher);
    CHECK(result.all_items == 4);
    REQUIRE(result.entries.size() == 4);
    CHECK(result.entries[3].raw_url == "http://r4.org/oai");
}

TEST_CASE("harvest_catalog fails loudly when the root is unreachable") {
    MapFetcher fetcher;
    SourceManifest m;
    m.catalog = {"x", "X"};
    m.steps.push_back(make_step("<u>(.*?)</u>"));
    m.steps[0].fetch_url = "gone";
    CHECK_THROWS_AS(harvest_catalog(m, fetcher), HarvestError);
}

TEST_CASE("manifest validation happens at load time") {
    CHECK_THROWS_AS(parse_manifest("not json"), ManifestError);
    CHECK_THROWS_AS(parse_manifest("{}"), ManifestError);  // root must be a list

    // unbalanced parenthesis: pattern errors surface at load, not extraction
    CHECK_THROWS_AS(parse_manifest(manifest_json(
                        R"json({"kind":"PatternExtract","fetch_url":"file:x","pattern":"(abc"})json")),
                    ManifestError);
    // capture group out of range
    CHECK_THROWS_AS(parse_manifest(manifest_json(
                        R"json({"kind":"PatternExtract","fetch_url":"file:x","pattern":"<u>(.*?)</u>","capture_group":2})json")),
                    ManifestError);
    // single step must extract, not follow
    CHECK_THROWS_AS(parse_manifest(manifest_json(
                        R"json({"kind":"LinkFollow","fetch_url":"file:x","pattern":"(x)"})json")),
                    ManifestError);
    // two-step shape is fixed
    CHECK_THROWS_AS(parse_manifest(manifest_json(
                        R"json({"kind":"PatternExtract","fetch_url":"file:x","pattern":"(x)"},
                           {"kind":"PatternExtract","pattern":"(y)"})json")),
                    ManifestError);
    // unknown fields are refused
    CHECK_THROWS_AS(parse_manifest(manifest_json(
                        R"json({"kind":"PatternExtract","fetch_url":"file:x","pattern":"(x)","oops":1})json")),
                    ManifestError);
    // duplicate ids
    CHECK_THROWS_AS(
        parse_manifest(
            R"json([{"id":"a","steps":[{"kind":"PatternExtract","fetch_url":"f","pattern":"(x)"}]},
                {"id":"a","steps":[{"kind":"PatternExtract","fetch_url":"f","pattern":"(x)"}]}])json"),
        ManifestError);

    auto ok = parse_manifest(manifest_json(
        R"json({"kind":"PatternExtract","fetch_url":"file:x","pattern":"<u>(.*?)</u>","capture_group":1})json"));
    REQUIRE(ok.size() == 1);
    CHECK(ok[0].catalog.id == "cat");
    CHECK(ok[0].steps[0].pattern_text == "<u>(.*?)</u>");
}

TEST_CASE("file fetcher resolves only file references") {
    FileFetcher fetcher(OMH_FIXTURES_DIR);
    auto ok = fetcher.fetch("file:corpus/opendoar.xml");
    REQUIRE(ok.ok);
    CHECK(ok.text.find("rOaiBaseUrl") != std::string::npos);
    CHECK_FALSE(fetcher.fetch("http://example.org/").ok);
    CHECK_FALSE(fetcher.fetch("file:corpus/missing.xml").ok);
}

TEST_CASE("golden replay: the shipped corpus harvests to the recorded lists") {
    auto manifests = load_manifest(std::string(OMH_FIXTURES_DIR) + "/corpus/manifest.json");
    REQUIRE(manifests.size() == 6);
    FileFetcher fetcher(OMH_FIXTURES_DIR);

    struct Expected {
        std::uint64_t all_items;
        std::vector<std::string> raw;
    };
    std::map<std::string, Expected> expected{
        {"opendoar",
         {6,
          {"http://repo-a.example.org/oai", "http://repo-b.example.org/cgi/oai2",
           "http://repo-c.example.net/oai/request", "http://repo-i.example.com/ojs/oai"}}},
        {"roar",
         {6,
          {"https://www.repo-a.example.org/oai/", "http://repo-b.example.org/cgi/oai2",
           "http://repo-b.example.org/cgi/oai2", "http://repo-d.example.net/perl/oai2",
           "http://repo-j.example.org/fedora/oai?from=2016-01-01"}}},
        {"openarchives",
         {3,
          {"http://www.repo-a.example.org/oai", "https://repo-c.example.net/oai/request",
           "http://repo-h.example.net/oai"}}},
        {"illinois",
         {4,
          {"https://repo-a.example.org/oai", "http://repo-b.example.org/cgi/oai2",
           "http://repo-e.example.com/oai2.php?verb=Identify&amp;metadataPrefix=oai_dc",
           "http://repo-h.example.net/oai"}}},
        {"oaister",
         {4,
          {"http://repo-a.example.org/oai/", "http://repo-e.example.com/oai2.php",
           "http://repo-g.example.org/oai/provider", "repo-k.example.net/oai"}}},
        {"openaire",
         {3,
          {"https://repo-a.example.org/oai", "http://repo-f.example.com/dspace-oai/request",
           "https://www.repo-j.example.org/fedora/oai"}}},
    };

    for (const auto& m : manifests) {
        auto result = harvest_catalog(m, fetcher);
        const auto& want = expected.at(m.catalog.id);
        CHECK(result.all_items == want.all_items);
        std::vector<std::string> raw;
        for (const auto& e : result.entries) raw.push_back(e.raw_url);
        CHECK(raw == want.raw);
    }
}

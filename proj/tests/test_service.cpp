#include <algorithm>
#include <cmath>
#include <memory>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "http_server.hpp"
#include "mcsg/edit.hpp"
#include "mcsg/image.hpp"
#include "mcsg/mcsg.h"
#include "mcsg/nodetrix.hpp"
#include "mcsg/roi.hpp"
#include "mcsg/serialization.hpp"
#include "mcsg/service.hpp"
#include "mcsg/synthetic.hpp"
#include "mcsg/view.hpp"
#include "support/edits.hpp"
#include "support/fixtures.hpp"

using namespace mcsg;
using nlohmann::json;

namespace {

struct Session {
  std::shared_ptr<const MsiDataset> ds = std::make_shared<const MsiDataset>(generate_synthetic().dataset);
  Service service{ds, ServiceConfig{}};
  Mcsg direct = build_mcsg(*ds, GraphConfig{});

  HttpResponse get(const std::string& path, const std::string& query = "") {
    return service.handle({"GET", path, query, ""});
  }
  HttpResponse post(const std::string& path, const std::string& body) {
    return service.handle({"POST", path, "", body});
  }
};

std::string png(const Raster& r) { return encode_png(r); }

void check_png(const HttpResponse& res, const Raster& want) {
  CHECK(res.status == 200);
  CHECK(res.content_type == "image/png");
  CHECK(res.body == png(want));
  CHECK(decode_png(res.body) == want);
}

}  // namespace

TEST_CASE("graph endpoints equal library calls") {
  Session s;
  const auto& g = s.direct;
  CHECK(s.get("/graph").body == export_json(g).dump());
  CHECK(s.get("/export").body == export_json(g).dump());
  CHECK(s.get("/graph/view").body == view_to_json(make_view(g, {}), g).dump());

  ExpansionState state;
  state.set(g, CommunityId{0}, true);
  state.set(g, CommunityId{2}, true);
  CHECK(s.get("/graph/view", "expanded=community%2F0,community/2").body == view_to_json(make_view(g, state), g).dump());

  const auto& members = g.hierarchy().get(CommunityId{1}).members;
  const auto m = nodetrix_matrix(g.graph(), members);
  json order = json::array();
  for (auto c : m.order) order.push_back(g.channels()[c].id);
  CHECK(json::parse(s.get("/graph/nodetrix", "nodes=community/1").body) ==
        json({{"node_order", order}, {"cells", m.cells}}));

  CHECK(s.get("/qgp", "format=csv").body == qgp_to_csv(compute_qgp(g)));
  const auto qgp = json::parse(s.get("/qgp").body);
  const auto report = compute_qgp(g);
  REQUIRE(qgp["nodes"].size() == report.nodes.size());
  for (std::size_t i = 0; i < report.nodes.size(); ++i) {
    CHECK(qgp["nodes"][i]["id"] == report.nodes[i].id);
    CHECK(qgp["nodes"][i]["betweenness"].get<double>() == report.nodes[i].betweenness);
    CHECK(qgp["nodes"][i]["weighted_degree"].get<double>() == report.nodes[i].weighted_degree);
  }
  const auto sorted = json::parse(s.get("/qgp", "sort=betweenness&order=desc").body);
  const auto rank = rank_nodes(report, QgpMetric::betweenness, true);
  for (std::size_t i = 0; i < rank.size(); ++i) CHECK(sorted["nodes"][i]["id"] == report.nodes[rank[i]].id);
}

TEST_CASE("meta endpoint") {
  Session s;
  const auto meta = json::parse(s.get("/dataset/meta").body);
  CHECK(meta["width"] == 32);
  CHECK(meta["height"] == 32);
  CHECK(meta["channels"].size() == 50);
  CHECK(meta["valid_pixels"] == s.ds->grid().valid_pixels().size());
  CHECK(meta["mask_rle"] == encode_mask_rle(s.ds->grid().mask()));
  for (std::size_t c = 0; c < 50; ++c) {
    CHECK(meta["channels"][c]["id"] == s.ds->channel(c).id);
    CHECK(meta["channels"][c]["mz"].get<double>() == s.ds->channel(c).mz);
  }
}

TEST_CASE("image endpoints equal library renders") {
  Session s;
  const auto& ds = *s.ds;
  const auto& id = ds.channel(7).id;
  check_png(s.get("/image/channel/" + id), render_channel(ds, 7, Colormap::viridis));
  check_png(s.get("/image/channel/" + id, "colormap=gray"), render_channel(ds, 7, Colormap::gray));
  const auto members = s.direct.hierarchy().get(CommunityId{0}).members;
  check_png(s.get("/image/aggregate", "nodes=community/0"), render_aggregate(ds, members, Colormap::viridis));
  const std::vector<ChannelIndex> pair{3, 9};
  check_png(s.get("/image/aggregate", "nodes=" + ds.channel(3).id + "," + ds.channel(9).id),
            render_aggregate(ds, pair, Colormap::viridis));
  check_png(s.get("/image/projection"), render_projection(ds, compute_projection(ds)));
  CHECK(s.get("/image/channel/nope").status == 404);
  CHECK(s.get("/image/optical/he").status == 404);
  CHECK(s.get("/image/channel/" + id, "colormap=jet").status == 400);
  CHECK(s.get("/image/aggregate").status == 400);
}

TEST_CASE("optical image endpoint") {
  RgbRaster he{"he", std::vector<std::uint8_t>(3 * 4)};
  for (std::size_t i = 0; i < he.rgb.size(); ++i) he.rgb[i] = static_cast<std::uint8_t>(20 * i);
  auto base = fixture::dataset_from(2, 2, {{1, 2, 3, 4}, {4, 3, 2, 1}, {1, 1, 2, 2}});
  std::vector<MassChannelImage> channels;
  for (ChannelIndex c = 0; c < base.channel_count(); ++c) channels.push_back(base.channel(c));
  auto ds = std::make_shared<const MsiDataset>("t", base.grid(), channels, std::vector{he});
  Service service(ds, ServiceConfig{});
  const auto res = service.handle({"GET", "/image/optical/he", "", ""});
  check_png(res, render_optical(*ds, he));
  const auto r = decode_png(res.body);
  CHECK(r.rgba[4] == 60);
  CHECK(r.rgba[7] == 255);
}

TEST_CASE("rendering properties") {
  // Channel 0 is constant zero, 1 and 2 have disjoint supports.
  const auto ds = fixture::dataset_from(4, 1, {{0, 0, 0, 0}, {2, 4, 0, 0}, {0, 0, 1, 3}});
  const auto zero = render_channel(ds, 0, Colormap::viridis);
  const auto low = apply_colormap(Colormap::viridis, 0.0);
  for (int p = 0; p < 4; ++p)
    for (int k = 0; k < 3; ++k) CHECK(zero.rgba[4 * p + k] == low[k]);

  const std::vector<ChannelIndex> twice{1, 1};
  CHECK(mean_normalized_image(ds, twice) == normalized_channel(ds, 1));
  const std::vector<ChannelIndex> both{1, 2};
  const auto mean = mean_normalized_image(ds, both);
  // Min-max scaled: {0.5, 1, 0, 0} and {0, 0, 1/3, 1}.
  const std::vector<double> want{0.25, 0.5, 1.0 / 6.0, 0.5};
  for (int p = 0; p < 4; ++p) CHECK(mean[p] == doctest::Approx(want[p]).epsilon(1e-12));
  CHECK(render_aggregate(ds, both, Colormap::gray) == render_scalar(ds.grid(), want, Colormap::gray));

  // Brighter colormap inputs never get darker.
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    const auto c = apply_colormap(Colormap::viridis, i / 100.0);
    const double luma = 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2];
    CHECK(luma >= prev - 1.0);
    prev = luma;
  }
}

TEST_CASE("reads leave the session unchanged") {
  Session s;
  const auto before = s.get("/export").body;
  const auto& id = s.ds->channel(0).id;
  for (const auto& [path, query] : std::vector<std::pair<std::string, std::string>>{
           {"/dataset/meta", ""}, {"/graph", ""}, {"/graph/view", "expanded=community/0"},
           {"/graph/nodetrix", "nodes=community/0"}, {"/qgp", ""}, {"/qgp", "format=csv"},
           {"/image/channel/" + id, ""}, {"/image/aggregate", "nodes=community/0"},
           {"/image/projection", ""}}) {
    CHECK(s.get(path, query).status == 200);
  }
  CHECK(s.post("/roi", R"({"polygon": [[0,0],[16,0],[16,16]], "mu": 0.5, "sigma": 0.5})").status == 200);
  CHECK(s.get("/export").body == before);
}

TEST_CASE("roi endpoint") {
  Session s;
  const auto synth = generate_synthetic();
  const std::vector<Point> poly{{2, 3}, {29, 5}, {20, 28}, {4, 20}};
  const auto sel = select_roi(*s.ds, poly, 0.5, 0.3);
  const auto doc = json::parse(
      s.post("/roi", R"({"polygon": [[2,3],[29,5],[20,28],[4,20]], "mu": 0.5, "sigma": 0.3})").body);
  REQUIRE(doc["matched"].size() == sel.matched_nodes.size());
  for (std::size_t i = 0; i < sel.matched_nodes.size(); ++i)
    CHECK(doc["matched"][i] == s.ds->channel(sel.matched_nodes[i]).id);
  CHECK(doc["region_size"] == sel.region.size());
  for (const auto& c : doc["communities"]) {
    const auto& members = s.direct.hierarchy().get(*parse_community_id(c.get<std::string>())).members;
    CHECK(std::any_of(members.begin(), members.end(), [&](ChannelIndex m) {
      return std::find(sel.matched_nodes.begin(), sel.matched_nodes.end(), m) != sel.matched_nodes.end();
    }));
  }

  CHECK(s.post("/roi", R"({"polygon": [[0,0],[4,4],[4,0],[0,4]], "mu": 0.5, "sigma": 0.5})").status == 422);
  CHECK(s.post("/roi", R"({"polygon": [[40,40],[50,40],[45,50]], "mu": 0.5, "sigma": 0.5})").status == 422);
  CHECK(s.post("/roi", R"({"polygon": [[0,0],[9,0],[9,9]], "mu": 2, "sigma": 0.5})").status == 400);
  CHECK(s.post("/roi", "not json").status == 400);
}

TEST_CASE("edit endpoints match the editor") {
  Session s;
  GraphEditor editor(s.direct);
  std::mt19937_64 rng(17);
  for (int step = 0; step < 15; ++step) {
    const auto cmd = fixture::random_edit(rng, editor.graph());
    const auto res = s.post("/edit", edit_command_to_json(cmd, editor.graph()).dump());
    REQUIRE(res.status == 200);
    const auto outcome = editor.apply(cmd);
    CHECK(json::parse(res.body)["applied"] == outcome.applied);
    CHECK(s.get("/graph").body == export_json(editor.graph()).dump());
  }
  for (int i = 0; i < 4; ++i) {
    CHECK(json::parse(s.post("/undo", "").body)["applied"] == editor.undo());
    CHECK(s.get("/graph").body == export_json(editor.graph()).dump());
  }
  CHECK(json::parse(s.post("/redo", "").body)["applied"] == editor.redo());
  CHECK(s.get("/graph").body == export_json(editor.graph()).dump());
}

TEST_CASE("invalid edits are rejected without change") {
  Session s;
  const auto before = s.get("/export").body;
  const auto& g = s.direct;
  const auto& members = g.hierarchy().get(CommunityId{0}).members;
  // Parts that do not cover the community.
  json split = {{"kind", "split"}, {"targets", {"community/0"}},
                {"parts", {{g.channels()[members[0]].id}, {g.channels()[members[1]].id}}}};
  CHECK(s.post("/edit", split.dump()).status == 422);
  CHECK(s.post("/edit", R"({"kind":"merge","targets":["community/0","community/999"]})").status == 404);
  CHECK(s.post("/edit", R"({"kind":"explode"})").status == 400);
  CHECK(s.post("/edit", "{").status == 400);
  CHECK(s.get("/export").body == before);
  const auto undo = json::parse(s.post("/undo", "").body);
  CHECK(undo["applied"] == false);
}

TEST_CASE("import endpoint") {
  Session s;
  GraphEditor editor(s.direct);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) editor.apply(fixture::random_edit(rng, editor.graph()));
  const auto doc = export_string(editor.graph());
  CHECK(s.post("/import", doc).status == 200);
  CHECK(s.get("/export").body == export_json(editor.graph()).dump());
  CHECK(s.post("/import", R"({"mcsg_version": 99})").status == 422);
  CHECK(s.get("/export").body == export_json(editor.graph()).dump());
}

TEST_CASE("unknown routes and methods") {
  Session s;
  CHECK(s.get("/nothing").status == 404);
  CHECK(s.service.handle({"POST", "/graph", "", ""}).status == 405);
  CHECK(s.service.handle({"GET", "/edit", "", ""}).status == 405);
  CHECK(s.service.handle({"DELETE", "/image/channel/x", "", ""}).status == 405);
  const auto err = json::parse(s.get("/nothing").body);
  CHECK(err.contains("error"));
  CHECK(err.contains("message"));
}

TEST_CASE("query parsing") {
  const auto q = parse_query("a=1&b=x%2Cy&c&d=hello+world&&");
  CHECK(q.at("a") == "1");
  CHECK(q.at("b") == "x,y");
  CHECK(q.at("c").empty());
  CHECK(q.at("d") == "hello world");
  CHECK(percent_decode("%zz%41") == "%zzA");
}

TEST_CASE("C API lifecycle and status codes") {
  mcsg_dataset* ds = nullptr;
  REQUIRE(mcsg_dataset_synthetic(0.05, 1, &ds) == MCSG_OK);
  CHECK(mcsg_dataset_channel_count(ds) == 50);

  mcsg_build_config config;
  mcsg_build_config_default(&config);
  config.tau = 1.5;
  mcsg_session* bad = nullptr;
  CHECK(mcsg_session_create(ds, &config, &bad) == MCSG_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::string(mcsg_last_error()).size() > 0);

  mcsg_session* s = nullptr;
  REQUIRE(mcsg_session_create(ds, nullptr, &s) == MCSG_OK);
  CHECK(mcsg_last_error() == std::string());
  char* exported = nullptr;
  REQUIRE(mcsg_session_export(s, &exported) == MCSG_OK);
  const auto synth = generate_synthetic();
  CHECK(exported == export_string(build_mcsg(synth.dataset, GraphConfig{})));

  CHECK(mcsg_session_undo(s) == MCSG_NOOP);
  CHECK(mcsg_session_edit(s, R"({"kind":"merge","targets":["community/0","community/1"]})", nullptr) == MCSG_OK);
  CHECK(mcsg_session_edit(s, R"({"kind":"merge","targets":["community/0","community/77"]})", nullptr) ==
        MCSG_ERR_NOT_FOUND);
  CHECK(mcsg_session_edit(s, "{", nullptr) == MCSG_ERR_FORMAT);
  CHECK(mcsg_session_undo(s) == MCSG_OK);
  char* after = nullptr;
  REQUIRE(mcsg_session_export(s, &after) == MCSG_OK);
  CHECK(std::string(after) == exported);
  CHECK(mcsg_session_redo(s) == MCSG_OK);
  CHECK(mcsg_session_redo(s) == MCSG_NOOP);

  CHECK(mcsg_session_import(s, exported) == MCSG_OK);
  CHECK(mcsg_session_import(s, "[]") != MCSG_OK);

  char* csv = nullptr;
  REQUIRE(mcsg_session_qgp_csv(s, &csv) == MCSG_OK);
  CHECK(std::string(csv).starts_with("node_id,community,"));

  mcsg_response res{};
  REQUIRE(mcsg_session_handle(s, "GET", "/image/projection", nullptr, nullptr, 0, &res) == MCSG_OK);
  CHECK(res.status == 200);
  CHECK(std::string(res.content_type) == "image/png");
  CHECK(decode_png(std::string_view(reinterpret_cast<const char*>(res.body), res.body_size)).width == 32);
  mcsg_response_free(&res);

  mcsg_session* imported = nullptr;
  CHECK(mcsg_session_create_imported(ds, exported, &imported) == MCSG_OK);
  CHECK(mcsg_session_create_imported(ds, "{}", &imported) != MCSG_OK);
  mcsg_session_free(imported);

  CHECK(mcsg_dataset_load("/nonexistent/file.json", &ds) == MCSG_ERR_IO);
  CHECK(mcsg_session_export(nullptr, &after) == MCSG_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mcsg_status_name(MCSG_ERR_EMPTY_REGION)) == "empty region");

  mcsg_string_free(exported);
  mcsg_string_free(after);
  mcsg_string_free(csv);
  mcsg_session_free(s);
  mcsg_dataset_free(ds);
}

TEST_CASE("live HTTP server forwards to the session") {
  mcsg_dataset* ds = nullptr;
  REQUIRE(mcsg_dataset_synthetic(0.05, 1, &ds) == MCSG_OK);
  mcsg_session* s = nullptr;
  REQUIRE(mcsg_session_create(ds, nullptr, &s) == MCSG_OK);
  {
    tools::HttpServer server(s);
    const int port = server.bind("127.0.0.1", 0);
    std::thread thread([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto meta = client.Get("/dataset/meta");
    REQUIRE(meta);
    CHECK(meta->status == 200);
    CHECK(json::parse(meta->body)["channels"].size() == 50);

    auto img = client.Get("/image/aggregate?nodes=community%2F0&colormap=gray");
    REQUIRE(img);
    CHECK(img->get_header_value("Content-Type") == "image/png");

    auto edit = client.Post("/edit", R"({"kind":"merge","targets":["community/0","community/1"]})",
                            "application/json");
    REQUIRE(edit);
    CHECK(json::parse(edit->body)["applied"] == true);
    auto graph = client.Get("/graph");
    char* exported = nullptr;
    REQUIRE(mcsg_session_export(s, &exported) == MCSG_OK);
    CHECK(json::parse(graph->body) == json::parse(exported));
    mcsg_string_free(exported);

    CHECK(client.Get("/missing")->status == 404);
    CHECK(client.Put("/graph", "", "text/plain")->status == 405);

    server.stop();
    thread.join();
  }
  mcsg_session_free(s);
  mcsg_dataset_free(ds);
}

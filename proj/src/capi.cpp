#include "ttkit_c.h"

#include <cstring>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttkit/carrying.hpp"
#include "ttkit/cone.hpp"
#include "ttkit/errors.hpp"
#include "ttkit/experiments.hpp"
#include "ttkit/generators.hpp"
#include "ttkit/io.hpp"
#include "ttkit/moves.hpp"
#include "ttkit/orbit.hpp"
#include "ttkit/track.hpp"

using namespace ttkit;

struct ttk_track {
  TrainTrack value;
};
struct ttk_measure {
  TransverseMeasure value;
};
struct ttk_word {
  std::vector<Move> value;
};
struct ttk_cone {
  FlatCone value;
};

namespace {

thread_local std::string g_last_error;

int set_error(const Error& e) {
  g_last_error = e.what();
  return (int)e.code();
}

int set_error(const std::exception& e) {
  g_last_error = e.what();
  return TTK_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& f) {
  try {
    f();
    return TTK_OK;
  } catch (const Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    return set_error(e);
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* ttk_last_error_message(void) { return g_last_error.c_str(); }

void ttk_string_free(char* s) { delete[] s; }

int ttk_track_load(const char* path, ttk_track** out) {
  return guarded([&] { *out = new ttk_track{load_track(path)}; });
}

int ttk_track_parse(const char* text, ttk_track** out) {
  return guarded([&] { *out = new ttk_track{parse_track_string(text)}; });
}

int ttk_track_serialize(const ttk_track* t, char** out) {
  return guarded([&] { *out = dup_string(serialize_track(t->value)); });
}

void ttk_track_free(ttk_track* t) { delete t; }

int ttk_catalog(const char* name, ttk_track** out) {
  return guarded([&] { *out = new ttk_track{catalog(name)}; });
}

int ttk_track_validate(const ttk_track* t, char** report, int* ok) {
  return guarded([&] {
    ValidationReport r = validate(t->value);
    std::ostringstream s;
    s << "slot_consistent: " << (r.slot_consistent ? "true" : "false") << "\n"
      << "generic: " << (r.generic ? "true" : "false") << "\n"
      << "connected: " << (r.connected ? "true" : "false") << "\n"
      << "maximal: " << (r.maximal ? "true" : "false") << "\n";
    for (const std::string& p : r.problems) s << "problem: " << p << "\n";
    *report = dup_string(s.str());
    *ok = r.ok();
  });
}

int ttk_track_regions(const ttk_track* t, char** report) {
  return guarded([&] {
    std::ostringstream s;
    for (const RegionBoundary& r : trace_regions(t->value)) {
      s << "region " << r.key << " cusps=" << r.cusps
        << (r.punctured ? " punctured" : "") << " sides:";
      for (const RegionSide& side : r.sides) s << " " << to_string(side);
      s << "\n";
    }
    SurfaceSignature sig = surface_signature(t->value);
    s << "surface genus=" << sig.genus << " punctures=" << sig.punctures
      << "\n";
    *report = dup_string(s.str());
  });
}

int ttk_track_recurrent(const ttk_track* t, int* recurrent, char** witness) {
  return guarded([&] {
    auto mu = is_recurrent(t->value);
    *recurrent = mu.has_value();
    if (witness) *witness = mu ? dup_string(serialize_measure(*mu)) : nullptr;
  });
}

int ttk_track_counts(const ttk_track* t, int* switches, int* branches) {
  return guarded([&] {
    *switches = t->value.num_switches();
    *branches = t->value.num_branches();
  });
}

int ttk_track_signature(const ttk_track* t, int* genus, int* punctures) {
  return guarded([&] {
    SurfaceSignature sig = surface_signature(t->value);
    *genus = sig.genus;
    *punctures = sig.punctures;
  });
}

int ttk_measure_load(const char* path, ttk_measure** out) {
  return guarded([&] { *out = new ttk_measure{load_measure(path)}; });
}

int ttk_measure_parse(const char* text, ttk_measure** out) {
  return guarded([&] {
    std::istringstream in(text);
    *out = new ttk_measure{parse_measure(in)};
  });
}

int ttk_measure_serialize(const ttk_measure* m, char** out) {
  return guarded([&] { *out = dup_string(serialize_measure(m->value)); });
}

void ttk_measure_free(ttk_measure* m) { delete m; }

int ttk_measure_check(const ttk_track* t, const ttk_measure* m, int* ok) {
  return guarded([&] { *ok = check_measure(t->value, m->value).empty(); });
}

int ttk_word_load(const char* path, ttk_word** out) {
  return guarded([&] { *out = new ttk_word{load_word(path)}; });
}

int ttk_word_parse(const char* text, ttk_word** out) {
  return guarded([&] {
    std::istringstream in(text);
    *out = new ttk_word{parse_word(in)};
  });
}

int ttk_word_serialize(const ttk_word* w, char** out) {
  return guarded([&] { *out = dup_string(serialize_word(w->value)); });
}

void ttk_word_free(ttk_word* w) { delete w; }

int ttk_word_length(const ttk_word* w, size_t* out) {
  return guarded([&] { *out = w->value.size(); });
}

int ttk_apply_word(const ttk_track* t, const ttk_word* w, ttk_track** out) {
  return guarded(
      [&] { *out = new ttk_track{apply_sequence(t->value, w->value).track}; });
}

int ttk_cone_ball(const ttk_track* t, const ttk_measure* m, int radius,
                  ttk_cone** out) {
  return guarded(
      [&] { *out = new ttk_cone{cone_ball(t->value, m->value, radius)}; });
}

int ttk_cone_to_json(const ttk_cone* c, char** out) {
  return guarded([&] { *out = dup_string(cone_to_json(c->value)); });
}

int ttk_cone_to_dot(const ttk_cone* c, char** out) {
  return guarded([&] { *out = dup_string(cone_to_dot(c->value)); });
}

void ttk_cone_free(ttk_cone* c) { delete c; }

namespace {

std::vector<int> parse_int_list(const std::string& text, char open,
                                char close) {
  std::vector<int> out;
  std::string body = text;
  if (open) {
    size_t a = body.find(open), b = body.find(close);
    if (a == std::string::npos || b == std::string::npos || b < a)
      fail(ErrorCode::ParseError, "expected a bracketed integer list");
    body = body.substr(a + 1, b - a - 1);
  }
  std::istringstream in(body);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    while (pos < tok.size() && std::isspace((unsigned char)tok[pos])) ++pos;
    if (pos != tok.size())
      fail(ErrorCode::ParseError, "bad integer '" + tok + "' in list");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int ttk_cone_json_distance(const char* json, const char* phi_a,
                           const char* phi_b, int* out) {
  return guarded([&] {
    // minimal reader: collect every "phi": [ ... ] vertex coordinate
    std::set<std::vector<int>> vertices;
    std::string text = json;
    size_t at = 0;
    bool in_vertices = false;
    size_t vstart = text.find("\"vertices\"");
    size_t vend = text.find("\"edges\"");
    if (vstart == std::string::npos)
      fail(ErrorCode::ParseError, "cone json: no \"vertices\" array");
    if (vend == std::string::npos) vend = text.size();
    at = vstart;
    (void)in_vertices;
    while (true) {
      size_t key = text.find("\"phi\"", at);
      if (key == std::string::npos || key >= vend) break;
      size_t open = text.find('[', key);
      size_t close = text.find(']', open);
      if (open == std::string::npos || close == std::string::npos)
        fail(ErrorCode::ParseError, "cone json: unterminated phi array");
      vertices.insert(
          parse_int_list(text.substr(open, close - open + 1), '[', ']'));
      at = close;
    }
    std::vector<int> a = parse_int_list(phi_a, 0, 0);
    std::vector<int> b = parse_int_list(phi_b, 0, 0);
    if (!vertices.count(a))
      fail(ErrorCode::NotInCone, "first point is not a cone vertex");
    if (!vertices.count(b))
      fail(ErrorCode::NotInCone, "second point is not a cone vertex");
    if (a.size() != b.size())
      fail(ErrorCode::ParseError, "coordinate lengths differ");
    int d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    *out = d;
  });
}

int ttk_orbit_certificate(const ttk_track* t, char** hex_out) {
  return guarded([&] {
    *hex_out = dup_string(hex_encode(canonical_form(colored_graph(t->value))));
  });
}

int ttk_same_orbit(const ttk_track* a, const ttk_track* b, int* out) {
  return guarded([&] { *out = same_orbit(a->value, b->value); });
}

int ttk_agree_file(const char* pos_path, const ttk_measure* m, char** report) {
  return guarded([&] {
    CarriedPosition pos = load_position(pos_path);
    AgreeResult res = agree(pos, measure_proxy(m->value));
    std::ostringstream s;
    s << "phases: " << res.phases << "\n";
    s << "base word (" << res.base_word.size() << " splits):\n";
    for (const Move& mv : res.base_word) s << "  " << to_string(mv) << "\n";
    s << "carried word (" << res.carried_word.size() << " moves):\n";
    for (const Move& mv : res.carried_word) s << "  " << to_string(mv) << "\n";
    s << "shift certificate (" << res.shift_certificate.size()
      << " shifts):\n";
    for (const Move& mv : res.shift_certificate)
      s << "  " << to_string(mv) << "\n";
    bool match =
        canonical_form(colored_graph(
            apply_sequence(res.final_base, res.shift_certificate).track)) ==
        canonical_form(colored_graph(res.final_carried));
    s << "certificate verified: " << (match ? "yes" : "NO") << "\n";
    *report = dup_string(s.str());
  });
}

int ttk_tt_ball(const ttk_track* t, int radius, int with_shifts, int directed,
                char** report) {
  return guarded([&] {
    *report = dup_string(
        render(tt_ball(t->value, radius, with_shifts != 0, directed != 0)));
  });
}

int ttk_distortion(const ttk_track* t, const ttk_measure* m, int radius,
                   char** report) {
  return guarded([&] {
    *report = dup_string(render(distortion_probe(t->value, m->value, radius)));
  });
}

int ttk_twist_growth(const ttk_track* t, int n, char** report) {
  return guarded([&] {
    *report = dup_string(render(twist_growth(pants_track_from_track(t->value), n)));
  });
}

}  // extern "C"

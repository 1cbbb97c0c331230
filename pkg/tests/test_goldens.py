"""Frozen exports of the standard test scenario: any change to emitter math,
RNG keying, geodesy, or serialization shows up as a golden diff here,
regardless of which kernel backend produced it."""

import json

from emberfield.emitters import EmitterConfig, build_emitters
from emberfield.forest import ForestConfig, forest_digest, generate_forest
from emberfield.scenario import ensure_extrema, load_georef, load_grid


def test_emitter_export_golden(manifest, flux_georef, golden_check):
    f_min, f_max = ensure_extrema(manifest)
    es = build_emitters(load_grid(manifest, "flux", 0), flux_georef,
                        EmitterConfig(f_min=f_min, f_max=f_max))
    golden_check("emitters_frame0.json", es.export_text(frame=0))


def test_forest_digest_golden(manifest, fuel_georef, golden_check):
    forest = generate_forest(load_grid(manifest, "canopy_fuel"),
                             load_grid(manifest, "surface_fuel"),
                             fuel_georef, ForestConfig(seed=0))
    doc = {"digest": f"{forest_digest(forest):016x}", "counts": forest.counts()}
    golden_check("forest_seed0.json", json.dumps(doc, sort_keys=True))

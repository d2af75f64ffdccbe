"""
Command line tour
=================

Everything in the library is also reachable through the `symflow` command;
inputs and outputs are JSON (and CSV for grids), and every seeded command is
byte-reproducible. This script drives the CLI in-process and leaves its
artifacts in ./cli_tour_out.
"""
import json
import pathlib

import numpy as np

from symflow.cli import main
from symflow.measures import InvariantMeasure, MarkovComponent
from symflow.sft import Sft, LocallyConstantFunction
from symflow.suspension import SuspensionSystem

out = pathlib.Path("cli_tour_out")
out.mkdir(exist_ok=True)

full2 = Sft(np.ones((2, 2), dtype=int))
golden = Sft(np.array([[1, 1], [1, 0]]))
g = LocallyConstantFunction.indicator(full2, (1,))
Q = np.tile([0.8, 0.2], (2, 1))
b02 = InvariantMeasure.single(MarkovComponent(full2, 1, [(0,), (1,)], Q))
b08 = InvariantMeasure.single(MarkovComponent(full2, 1, [(0,), (1,)], Q[:, ::-1].copy()))
system = SuspensionSystem(full2, LocallyConstantFunction(full2, 1, {(0,): 1.0, (1,): 2.0}))

(out / "golden.json").write_text(json.dumps(golden.to_json()))
(out / "full2.json").write_text(json.dumps(full2.to_json()))
(out / "g.json").write_text(json.dumps(g.to_json()))
(out / "targets.json").write_text(json.dumps([b02.to_json(), b08.to_json()]))
(out / "system.json").write_text(json.dumps(system.to_json()))

print("$ symflow entropy --sft golden.json")
main(["entropy", "--sft", str(out / "golden.json")])
print()

print("$ symflow pressure --beta-grid=-2:2:9 ...")
main(["pressure", "--sft", str(out / "full2.json"), "--g", str(out / "g.json"),
      "--beta-grid=-2:2:9", "--out", str(out / "pressure.csv")])
print((out / "pressure.csv").read_text())

print("$ symflow spectrum --alpha-grid 0.1:0.9:9 ...")
main(["spectrum", "--sft", str(out / "full2.json"), "--g", str(out / "g.json"),
      "--alpha-grid", "0.1:0.9:9", "--out", str(out / "spectrum.csv")])
print((out / "spectrum.csv").read_text())

print("$ symflow horseshoe --eta 0.5 --zeta 0.4 --seed 0 ...")
main(["horseshoe", "--sft", str(out / "full2.json"),
      "--targets", str(out / "targets.json"),
      "--eta", "0.5", "--zeta", "0.4", "--n-max", "16", "--seed", "0",
      "--out", str(out / "pack.json")])
print()

print("$ symflow certify --samples 100 --seed 0 --system system.json ...")
main(["certify", "--pack", str(out / "pack.json"), "--samples", "100",
      "--seed", "0", "--system", str(out / "system.json"),
      "--out", str(out / "certificate.json")])
print()

req = {"kind": "intermediate", "sft": full2.to_json(), "g": g.to_json(),
       "alpha": 0.3, "c": 0.25}
(out / "request.json").write_text(json.dumps(req))
print("$ symflow witness --request request.json --out w.json")
main(["witness", "--request", str(out / "request.json"), "--out", str(out / "w.json")])
print()

print("$ symflow verify --measure w.json")
main(["verify", "--measure", str(out / "w.json")])
print()
print("artifacts in", out.resolve())

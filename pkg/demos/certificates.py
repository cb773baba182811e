"""Check the shipped FAR and WFAR certificates, then rebuild the FAR one from
its two-state DFA and list the weighted classes of the WFAR closure."""
import json

from busybeaver.far import NfaCertificate, check_far, dfa_to_nfa
from busybeaver.pipeline import data_path
from busybeaver.wfar import WfarCertificate, check_wfar

far_doc = data_path("far_example.json").read_text()
machine = json.loads(far_doc)["machine"]
cert = NfaCertificate.from_json(far_doc)
print(machine, "FAR:", check_far(machine, cert))
rebuilt = dfa_to_nfa(machine, [[0, 1], [0, 0]])
print("rebuilt from DFA:", check_far(machine, rebuilt), "labels", " ".join(rebuilt.labels))

wfar_doc = data_path("wfar_example.json").read_text()
machine = json.loads(wfar_doc)["machine"]
res = check_wfar(machine, WfarCertificate.from_json(wfar_doc))
print(machine, "WFAR:", res)
for c in res.closure.members():
    print("  ", c.show())

"""End-to-end walkthrough on the ACLED-style fixture.

Discovers joinable attributes for the Country column, then applies the
bundled plan file (value of "basic form of government", then a through-join
to "subclass of") and prints the augmented table.

Usage:
    python3 scripts/acled_demo.py
"""

from pathlib import Path

from kgforage.client import BackendConfig, KgClient
from kgforage.discovery import DiscoveryConfig, discover_related
from kgforage.materialize import materialize
from kgforage.plans import JoinPlan
from kgforage.table import export_csv, import_csv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    client = KgClient(BackendConfig.from_selector(f"local:{FIXTURES / 'acled_countries.jsonl'}"))
    dataset = import_csv((FIXTURES / "acled_countries.csv").read_bytes())

    print("== related attributes for Country ==")
    for desc in discover_related(client, dataset, "Country", DiscoveryConfig(rng_seed=0)):
        print(f"  {desc.property:>4}  {desc.label:<28} coverage={desc.coverage:.2f} "
              f"({desc.datatype}, {desc.cardinality})")

    for plan in JoinPlan.list_from_file(FIXTURES / "acled_plans.json"):
        dataset = materialize(client, dataset, plan)

    print("\n== augmented table ==")
    print(export_csv(dataset).decode(), end="")


if __name__ == "__main__":
    main()

"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

import math
import sys
import os
import time
from datetime import datetime

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from core.config import PROJECT_ROOT, default_jobs, load_config
from core.geometry import MassVector
from engine.oracle import cartesian_check, multistart_uniqueness
from engine.records import encode_json
from engine.solver import SolverOptions, certify_minimum, minimize_U


def random_masses(rng, n, low=0.2, high=5.0):
    """Лог-равномерные массы в [low, high]"""
    values = np.exp(rng.uniform(math.log(low), math.log(high), (n, 4)))
    return [MassVector.from_array(v) for v in values]


def uniqueness_sweep(n_masses=20, n_starts=50, seed=0):
    """Один кластер на каждый вектор масс и сертификат минимума"""
    print("=" * 50)
    print("ПРОВЕРКА ЕДИНСТВЕННОСТИ")
    print("=" * 50)

    config = load_config()
    opts = SolverOptions.from_config(config)
    rng = np.random.default_rng(seed)
    jobs = default_jobs(config)

    entries = []
    failures = 0
    started = time.time()
    for k, m in enumerate(random_masses(rng, n_masses)):
        report = multistart_uniqueness(m, n_starts, seed + k, opts, max_workers=jobs)
        rec = minimize_U(m, opts)
        cert = certify_minimum(rec, config)
        cartesian = cartesian_check(rec, config)
        ok = report.cluster_count == 1 and cert.passed and cartesian.passed
        failures += 0 if ok else 1
        print(f"{k:3d}  m = {np.round(m.as_array(), 4).tolist()}  кластеров: {report.cluster_count}  "
              f"U* = {rec.scalars.U:.10f}  вписанная: {rec.is_cocircular}  {'OK' if ok else 'FAIL'}")
        entries.append({
            "uniqueness": report.to_dict(),
            "certified": cert.passed,
            "failed_checks": cert.failed(),
            "cartesian_residual": cartesian.value,
            "is_cocircular": rec.is_cocircular,
        })

    log_file = PROJECT_ROOT / "data" / "logs" / f"uniqueness_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    log_file.parent.mkdir(parents=True, exist_ok=True)
    with open(log_file, 'w', encoding='utf-8') as f:
        f.write(encode_json({"seed": seed, "n_starts": n_starts, "entries": entries}))

    print(f"\nГотово за {time.time() - started:.1f} с, отказов: {failures}")
    print(f"Лог: {log_file}")
    return failures == 0


if __name__ == "__main__":
    n_masses = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    n_starts = int(sys.argv[2]) if len(sys.argv) > 2 else 50
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    sys.exit(0 if uniqueness_sweep(n_masses, n_starts, seed) else 1)

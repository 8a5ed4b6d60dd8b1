#!/usr/bin/env python3
"""Function-fitting demonstration: network versus least-squares line on the
linear, quadratic, and damped-sine curves, with optional plots."""

import argparse

from tornado_damage.fitting_demo import DEMO_FUNCTIONS, run_demo


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=60)
    parser.add_argument("--plot", metavar="PNG", help="write a comparison figure")
    args = parser.parse_args()

    results = run_demo(seed=args.seed, epochs=args.epochs)
    for name, values in results.items():
        ratio = values["nn_mse"] / values["linear_mse"] if values["linear_mse"] > 0 else float("inf")
        print(f"{name:10s} nn_mse={values['nn_mse']:.3e} linear_mse={values['linear_mse']:.3e} "
              f"ratio={ratio:.4f}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np

        from tornado_damage.fitting_demo import linear_oracle_mse
        from tornado_damage.nn import (
            HiddenActivation, LossKind, Mode, NetworkSpec, OutputActivation,
            forward, init_params,
        )
        from tornado_damage.optim import OptimizerKind, TrainConfig, train

        fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
        grid = np.linspace(-5, 5, 400)
        rng = np.random.default_rng(args.seed)
        for ax, (name, fn) in zip(axes, DEMO_FUNCTIONS.items()):
            x = rng.uniform(-5, 5, size=10_000)
            y = fn(x)
            spec = NetworkSpec(n_inputs=1, hidden_widths=(32,))
            params = init_params(spec, args.seed)
            train(spec, params, x[:, None], y, TrainConfig(
                epochs=args.epochs, learning_rate=0.01, seed=args.seed,
                optimizer=OptimizerKind.ADAM,
            ))
            nn_curve, _ = forward(params, spec, grid[:, None], Mode.EVAL)
            design = np.column_stack([np.ones_like(x), x])
            coef = np.linalg.lstsq(design, y, rcond=None)[0]
            ax.plot(grid, fn(grid), "k-", label="truth")
            ax.plot(grid, coef[0] + coef[1] * grid, "r--", label="line")
            ax.plot(grid, nn_curve, "c-", label="network")
            ax.set_title(name)
            ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        print(f"figure written to {args.plot}")


if __name__ == "__main__":
    main()

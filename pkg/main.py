import sys
import argparse
import logging

from dotenv import load_dotenv

from harness import experiment
from schemas import CommandResult
from utils.config import load_experiment_config
from utils.errors import (
    ConfigValidationError,
    DegenerateDataError,
    DivergenceError,
    DomainError,
    InfeasibleTopologyError,
)
from utils.logger import logger as app_logger

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

# ==============================
# Argumentos
# ==============================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsad-quantile",
        description="Regressão quantílica penalizada descentralizada (DSAD) e baseline de subgradiente.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="Arquivo de experimento chave=valor")
        p.add_argument("--out", default=None, help="Diretório de saída (sobrepõe output_dir)")
        p.add_argument("--trials", type=int, default=None, help="Número de trials (sobrepõe trials)")
        p.add_argument("--seed", type=int, default=None, help="Semente base (sobrepõe base_seed)")

    common(sub.add_parser("generate", help="Gera grafo e dados de cada trial"))
    run = sub.add_parser("run", help="Executa um algoritmo em todos os trials")
    common(run)
    run.add_argument("--algorithm", required=True, help="dsad_mcp, dsad_scad ou baseline")
    common(sub.add_parser("compare", help="Compara DSAD-MCP, DSAD-SCAD e o baseline"))
    common(sub.add_parser("validate", help="Confere as condições de convergência"))
    return parser


# ==============================
# Execução
# ==============================

def dispatch(args: argparse.Namespace) -> CommandResult:
    overrides = {"output_dir": args.out, "trials": args.trials, "base_seed": args.seed}
    exp = load_experiment_config(args.config, overrides)
    if args.command == "generate":
        return experiment.cmd_generate(exp)
    if args.command == "run":
        return experiment.cmd_run(exp, args.algorithm)
    if args.command == "compare":
        return experiment.cmd_compare(exp)
    return experiment.cmd_validate(exp)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = dispatch(args)
        code = EXIT_OK
    except (ConfigValidationError, DomainError, DegenerateDataError) as e:
        logger.error(f"❌ [Harness] {args.command}: {e}", exc_info=True)
        violations = getattr(e, "violations", [str(e)])
        result = CommandResult(status="error", command=args.command, message=str(e), details={"violations": violations})
        code = EXIT_VALIDATION
    except (DivergenceError, InfeasibleTopologyError, OSError) as e:
        logger.error(f"💥 [Harness] {args.command}: {e}", exc_info=True)
        result = CommandResult(status="error", command=args.command, message=str(e))
        code = EXIT_RUNTIME
    except Exception as e:
        logger.error(f"💥 [Harness] Erro inesperado em {args.command}: {e}", exc_info=True)
        result = CommandResult(status="error", command=args.command, message=str(e))
        code = EXIT_RUNTIME

    print(result.model_dump_json(indent=2))
    app_logger.info(f"🏁 [Harness] {args.command} terminou com código {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Allow running as python -m vsl_dro."""
from vsl_dro.cli.main import main

raise SystemExit(main())

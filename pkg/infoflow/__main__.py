from infoflow.cli import main

raise SystemExit(main())

import sys


def outer_environment_check():
    """
    Checks the environment BEFORE importing the numerical stack,
    so a broken install fails with one readable line instead of a traceback.
    """
    print("🛡️  pnegprep environment check...", file=sys.stderr)

    v = sys.version_info
    print(f"   ℹ️  Python Version: {v.major}.{v.minor}.{v.micro}", file=sys.stderr)
    if (v.major, v.minor) < (3, 9):
        print("   ❌ Python >= 3.9 is required.", file=sys.stderr)
        sys.exit(1)

    for module in ("numpy", "pandas", "toml", "dotenv"):
        try:
            __import__(module)
        except ImportError as e:
            print(f"   ❌ Import Error ({module}): {e}", file=sys.stderr)
            print("   👉 ACTION: Run 'pip install -r requirements.txt'", file=sys.stderr)
            sys.exit(1)

    print("   🟢 Environment Check Passed.", file=sys.stderr)


if __name__ == "__main__":
    # Windows Unicode Fix
    try:
        if hasattr(sys.stdout, 'reconfigure'):
            sys.stdout.reconfigure(encoding='utf-8')
            sys.stderr.reconfigure(encoding='utf-8')
    except Exception:
        pass

    outer_environment_check()

    import io_cli

    try:
        sys.exit(io_cli.main(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n   🛑 Interrupted.", file=sys.stderr)
        sys.exit(1)

"""Test suite for AgentOS CLI."""
